"""Scenario type and the bracket-command scenario syntax.

A scenario is one line::

    scenario disc-B[tag:B][family:power][beta:0.5][alpha:0.5][radii:2^-3..2^-10]

Every ``[key:value]`` sets the field of the same name on :class:`Scenario`.
"""

import re
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from ..boundary import list_families
from ..config import DEFAULTS, coerce_value
from ..errors import ConfigError
from ..kernels import NORMALIZATIONS

TAGS = ("A", "B", "KVM", "T1", "T2", "T4-sharpness", "L2.2-kernel", "P-lq", "slice-B0", "balance")
PREDICTION_TAGS = ("A", "B", "KVM", "T1", "T2", "T4-sharpness", "balance")
EVALUATORS = ("auto", "lift", "mc")

FAMILY_PARAMS = {
    "constant": ("c",),
    "holder_cusp": ("alpha",),
    "power": ("beta",),
    "log_spike": ("gamma",),
}


@dataclass
class Scenario:
    name: str
    tag: str
    n: int = 1
    family: str = "power"
    c: Optional[float] = None
    beta: Optional[float] = None
    gamma: Optional[float] = None
    base: Optional[str] = None
    alpha: Optional[float] = None
    p: Optional[float] = None
    q: Optional[float] = None
    predict: Optional[float] = None
    radii: Tuple[float, ...] = DEFAULTS.default_radii
    count: Union[int, str] = "auto"
    seed: int = 0
    tolerance: float = DEFAULTS.verdict_tolerance
    evaluator: str = "auto"
    method: str = "auto"
    dilation: float = DEFAULTS.dilation
    delta: float = 0.05
    eps: float = 0.1
    threads: int = 1
    mc_count: int = 20_000
    norm_count: int = 20_000
    j: Tuple[int, ...] = (1, 2, 3, 4, 5)
    normalization: str = "lemma"
    directions: int = 16
    angles: int = 2 ** 10
    weighted: bool = False
    floor: float = DEFAULTS.floor

    # --- derived ---

    @property
    def resolved_gamma(self) -> Optional[float]:
        """gamma of the log-spike base; defaults to ``0.9 / (p/n + eps)`` for sharpness runs."""
        if self.gamma is not None:
            return self.gamma
        if self.tag == "T4-sharpness" and self.p is not None:
            return 0.9 / (self.p / self.n + self.eps)
        return None

    def family_params(self) -> Dict[str, Any]:
        """Keyword parameters for :func:`outerlab.boundary.make_modulus`."""
        if self.family == "lifted_1d":
            base = self.base or "log_spike"
            params: Dict[str, Any] = {"base": base}
            params.update(self._params_for(base))
            return params
        return self._params_for(self.family)

    def _params_for(self, family_name: str) -> Dict[str, Any]:
        values = {"c": self.c, "alpha": self.alpha, "beta": self.beta, "gamma": self.resolved_gamma}
        return {key: values[key] for key in FAMILY_PARAMS.get(family_name, ()) if values[key] is not None}

    # --- validation ---

    def validate(self) -> 'Scenario':
        problems = []
        if self.tag not in TAGS:
            problems.append(f"unknown tag '{self.tag}' (expected one of {', '.join(TAGS)})")
        if not isinstance(self.n, int) or self.n < 1:
            problems.append(f"n must be a positive integer, got {self.n!r}")
        families = list_families()
        if self.family not in families:
            problems.append(f"unknown family '{self.family}' (available: {', '.join(families)})")
        if self.base is not None and self.base not in families:
            problems.append(f"unknown base family '{self.base}'")
        if self.tag in ("A", "B", "KVM") and self.n != 1:
            problems.append(f"tag {self.tag} lives on the disc and needs n=1")
        if self.tag in ("T1", "T2", "T4-sharpness") and self.n < 2:
            problems.append(f"tag {self.tag} lives on the ball and needs n>=2")
        if self.tag in PREDICTION_TAGS and (self.alpha is None or not 0 < self.alpha < 1):
            problems.append(f"tag {self.tag} needs alpha in (0, 1)")
        if self.tag in ("KVM", "T1", "T4-sharpness") and (self.p is None or not self.p > 1):
            problems.append(f"tag {self.tag} needs p > 1")
        if self.tag == "T4-sharpness":
            if self.p is not None and not self.p > self.n:
                problems.append("T4-sharpness needs p > n")
            if self.family != "lifted_1d":
                problems.append("T4-sharpness needs family lifted_1d")
            if not (self.delta > 0 and self.eps > 0):
                problems.append("T4-sharpness needs delta > 0 and eps > 0")
        if self.tag == "P-lq" and (self.q is None or self.q < 1):
            problems.append("P-lq needs q >= 1")
        if self.tag == "slice-B0" and self.family == "log_spike" and self.n > 1:
            problems.append("log_spike is one-dimensional; use lifted_1d")
        if not self.radii or any(r <= 0 or r > 2 for r in self.radii):
            problems.append("radii must lie in (0, 2]")
        elif any(b >= a for a, b in zip(self.radii, self.radii[1:])):
            problems.append("radii must be strictly decreasing")
        if self.tag == "P-lq" and any(r >= 1 for r in self.radii):
            problems.append("P-lq radii are gaps 1 - r and must be below 1")
        if self.count != "auto" and (not isinstance(self.count, int) or self.count < DEFAULTS.min_oscillation_samples):
            problems.append(f"count must be 'auto' or an integer >= {DEFAULTS.min_oscillation_samples}")
        if self.evaluator not in EVALUATORS:
            problems.append(f"evaluator must be one of {EVALUATORS}")
        if self.normalization not in NORMALIZATIONS:
            problems.append(f"normalization must be one of {NORMALIZATIONS}")
        if self.threads < 1:
            problems.append("threads must be >= 1")
        if problems:
            raise ConfigError(f"scenario '{self.name}': " + "; ".join(problems))
        return self

    # --- serialization ---

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["radii"] = list(self.radii)
        data["j"] = list(self.j)
        return data

    def to_line(self) -> str:
        """The scenario line that reproduces this scenario."""
        default = Scenario(name=self.name, tag=self.tag)
        parts = [f"scenario {self.name}", f"[tag:{self.tag}]"]
        for f in fields(self):
            if f.name in ("name", "tag"):
                continue
            value = getattr(self, f.name)
            if value is None or value == getattr(default, f.name):
                continue
            parts.append(f"[{f.name}:{_format(value)}]")
        return "".join(parts)


def _format(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "%.12g" % value
    if isinstance(value, tuple):
        return ",".join(_format(v) for v in value)
    return str(value)


SCENARIO_KEYS = frozenset(f.name for f in fields(Scenario)) - {"name"}
_TUPLE_KEYS = {"radii": float, "j": int}
_COMMAND = re.compile(r'\[([^:\]]+):([^\]]+)\]')


def _parse_commands(text: str) -> Tuple[str, Dict[str, str]]:
    commands: Dict[str, str] = {}

    def extract_command(match):
        commands[match.group(1).strip()] = match.group(2).strip()
        return ""

    rest = _COMMAND.sub(extract_command, text).strip()
    return rest, commands


def coerce_settings(raw: Mapping[str, Any], where: str = "") -> Dict[str, Any]:
    """Coerce DSL strings to field values and reject unknown keys."""
    unknown = sorted(set(raw) - SCENARIO_KEYS)
    if unknown:
        raise ConfigError(f"{where}unknown key(s): {', '.join(unknown)}")
    settings: Dict[str, Any] = {}
    for key, value in raw.items():
        value = coerce_value(value) if isinstance(value, str) else value
        if key in _TUPLE_KEYS:
            kind = _TUPLE_KEYS[key]
            items = value if isinstance(value, tuple) else (value,)
            try:
                value = tuple(kind(v) for v in items)
            except (TypeError, ValueError):
                raise ConfigError(f"{where}bad value for {key}: {value!r}") from None
        elif key in ("alpha", "beta", "gamma", "c", "p", "q", "predict", "tolerance",
                     "dilation", "delta", "eps", "floor") and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        elif key in ("n", "seed", "threads", "mc_count", "norm_count", "directions", "angles", "count"):
            if isinstance(value, float) and value.is_integer():
                value = int(value)
        elif key in ("family", "base", "tag", "evaluator", "method", "normalization"):
            value = str(value)
        settings[key] = value
    return settings


def parse_scenario(line: str, defaults: Mapping[str, Any] = None) -> Scenario:
    """Parse ``scenario NAME[key:value]...`` into a validated :class:`Scenario`.

    ``defaults`` are suite-level settings; keys on the line override them.
    """
    rest, commands = _parse_commands(line)
    words = rest.split()
    if len(words) != 2 or words[0] != "scenario":
        raise ConfigError(f"expected 'scenario NAME[key:value]...', got {line.strip()!r}")
    name = words[1]
    where = f"scenario '{name}': "
    settings = dict(defaults or {})
    settings.update(coerce_settings(commands, where))
    if "tag" not in settings:
        raise ConfigError(f"{where}missing [tag:...]")
    try:
        scenario = Scenario(name=name, **settings)
    except TypeError as exc:
        raise ConfigError(f"{where}{exc}") from exc
    return scenario.validate()


__all__ = ["Scenario", "TAGS", "SCENARIO_KEYS", "parse_scenario", "coerce_settings"]
