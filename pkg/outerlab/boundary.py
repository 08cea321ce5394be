"""Boundary modulus profiles and the functionals measured on them.

Profiles are built from named families registered with the ``@family`` decorator:

    @family("power", description="|1 - zeta_1|^beta")
    def power_family(n, floor, beta=0.5):
        ...

and instantiated with :func:`make_modulus`. Every evaluation is clamped below at
``floor`` and clamp events are counted on the profile.

Usage
-----
>>> phi = make_modulus("holder_cusp", {"alpha": 0.5}, n=2)
>>> log_lp_norm(phi, p=2, count=10_000, sampler=SeededSampler(1))
>>> slice_constant(phi, directions=16, angles=2**10, sampler=SeededSampler(2))
"""

import logging
import math
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

import numpy as np
from scipy import integrate

from .config import DEFAULTS
from .errors import ConfigError, DomainError
from .sphere import (SeededSampler, SpherePoint, as_coords, niso_distance, sample_cap,
                     sample_sphere)

logger = logging.getLogger(__name__)


@dataclass
class ModulusProfile:
    """A boundary modulus phi on S^n with its clamp bookkeeping.

    ``evaluator`` maps a ``(count, n)`` array to raw values; calling the profile
    returns them clamped at ``floor``. ``circle_profile`` is the 1-D modulus psi on T
    (as a function of the angle) when the profile is built from one, and ``is_lift``
    marks profiles equal to ``|g(zeta_1)|`` for an outer function g on the disc.
    """
    evaluator: Callable[[np.ndarray], np.ndarray]
    dimension: int
    floor: float
    descriptor: Dict[str, Any]
    circle_profile: Optional[Callable[[np.ndarray], np.ndarray]] = None
    singular_angle: float = 0.0
    is_lift: bool = False
    clamp_events: int = field(default=0, init=False)
    evaluations: int = field(default=0, init=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    def _clamp(self, raw: np.ndarray) -> np.ndarray:
        raw = np.asarray(raw, dtype=float)
        low = raw < self.floor
        with self._lock:
            self.clamp_events += int(np.count_nonzero(low))
            self.evaluations += raw.size
        return np.where(low, self.floor, raw)

    def __call__(self, points) -> np.ndarray:
        coords = as_coords(points)
        if coords.shape[1] != self.dimension:
            raise ConfigError(f"Profile lives on S^{self.dimension}, got points with n={coords.shape[1]}")
        return self._clamp(self.evaluator(coords))

    def log(self, points) -> np.ndarray:
        return np.log(self(points))

    def circle(self, theta) -> np.ndarray:
        """psi(e^{i theta}), clamped."""
        if self.circle_profile is None:
            raise ConfigError(f"Family '{self.name}' has no circle profile")
        return self._clamp(self.circle_profile(np.asarray(theta, dtype=float)))

    @property
    def name(self) -> str:
        return self.descriptor.get("family", "?")

    @property
    def clamp_fraction(self) -> float:
        return self.clamp_events / self.evaluations if self.evaluations else 0.0

    def reset_counters(self) -> None:
        with self._lock:
            self.clamp_events = 0
            self.evaluations = 0


# --- FAMILY REGISTRY ---

@dataclass
class FamilyInfo:
    """A registered modulus family."""
    build_fn: Callable[..., ModulusProfile]
    name: str
    description: str = ""
    circle_only: bool = False


class FamilyRegistry:
    """Registry of modulus families by name."""

    def __init__(self):
        self._families: Dict[str, FamilyInfo] = {}

    def register(self, build_fn: Callable, name: str, description: str = "",
                 circle_only: bool = False):
        self._families[name] = FamilyInfo(build_fn, name, description or build_fn.__doc__ or "",
                                          circle_only)

    def get(self, name: str) -> FamilyInfo:
        try:
            return self._families[name]
        except KeyError:
            raise ConfigError(
                f"Unknown family '{name}'. Available: {', '.join(sorted(self._families))}") from None

    def list_families(self) -> Dict[str, str]:
        return {name: info.description for name, info in sorted(self._families.items())}

    def __contains__(self, name: str) -> bool:
        return name in self._families


_family_registry = FamilyRegistry()


def family(name: str, description: str = "", circle_only: bool = False):
    """Register a family builder ``build(n, floor, **params) -> ModulusProfile``."""
    def decorator(func: Callable):
        _family_registry.register(func, name, description, circle_only)
        return func
    return decorator


def list_families() -> Dict[str, str]:
    return _family_registry.list_families()


def make_modulus(family_name: str, params: Mapping[str, Any] = None, n: int = 1,
                 floor: float = None, **extra: Any) -> ModulusProfile:
    """Build a profile of a registered family on S^n."""
    if n < 1:
        raise ConfigError(f"Dimension must be >= 1, got {n}")
    info = _family_registry.get(family_name)
    if info.circle_only and n > 1:
        raise ConfigError(f"Family '{family_name}' is one-dimensional; use lifted_1d with base={family_name}")
    merged = dict(params or {})
    merged.update(extra)
    floor = DEFAULTS.floor if floor is None else floor
    if not floor > 0:
        raise ConfigError(f"floor must be positive, got {floor}")
    try:
        return info.build_fn(n, floor, **merged)
    except TypeError as exc:
        raise ConfigError(f"Bad parameters for family '{family_name}': {exc}") from exc


def _first(coords: np.ndarray) -> np.ndarray:
    return coords[:, 0]


def _wrap(theta: np.ndarray) -> np.ndarray:
    return np.angle(np.exp(1j * theta))


@family("constant", description="phi = c")
def constant_family(n: int, floor: float, c: float = 1.0) -> ModulusProfile:
    if not c > 0:
        raise ConfigError(f"constant family needs c > 0, got {c}")
    return ModulusProfile(
        evaluator=lambda z: np.full(z.shape[0], float(c)),
        dimension=n, floor=floor, descriptor={"family": "constant", "c": c},
        circle_profile=lambda theta: np.full(np.shape(theta), float(c)),
        is_lift=True)


@family("holder_cusp", description="phi = min(1, d(zeta, 1)^alpha)")
def holder_cusp_family(n: int, floor: float, alpha: float = 0.5) -> ModulusProfile:
    if not 0 < alpha < 1:
        raise ConfigError(f"holder_cusp needs alpha in (0, 1), got {alpha}")
    return ModulusProfile(
        evaluator=lambda z: np.minimum(1.0, np.abs(1.0 - _first(z)) ** alpha),
        dimension=n, floor=floor, descriptor={"family": "holder_cusp", "alpha": alpha},
        circle_profile=lambda theta: np.minimum(1.0, np.abs(1.0 - np.exp(1j * theta)) ** alpha),
        is_lift=(n == 1))


@family("power", description="phi = |1 - zeta_1|^beta, the modulus of (1 - z_1)^beta")
def power_family(n: int, floor: float, beta: float = 0.5) -> ModulusProfile:
    if not beta > 0:
        raise ConfigError(f"power family needs beta > 0, got {beta}")
    return ModulusProfile(
        evaluator=lambda z: np.abs(1.0 - _first(z)) ** beta,
        dimension=n, floor=floor, descriptor={"family": "power", "beta": beta},
        circle_profile=lambda theta: np.abs(1.0 - np.exp(1j * theta)) ** beta,
        is_lift=True)


def log_spike_circle(gamma: float, floor: float) -> Callable[[np.ndarray], np.ndarray]:
    """psi(theta) = exp(-w(theta) * min(|theta|^-gamma, log(1/floor))).

    w is 1 on |theta| <= pi/2 and decays as a squared cosine to 0 at |theta| = pi.
    """
    cap = math.log(1.0 / floor)

    def psi(theta: np.ndarray) -> np.ndarray:
        t = np.abs(_wrap(np.asarray(theta, dtype=float)))
        with np.errstate(divide='ignore'):
            spike = np.where(t > 0, np.minimum(t ** -gamma, cap), cap)
        taper = np.where(t <= math.pi / 2, 1.0, np.cos(t - math.pi / 2) ** 2)
        return np.exp(-taper * spike)
    return psi


@family("log_spike", description="1-D psi with log psi ~ -|theta|^-gamma near 0", circle_only=True)
def log_spike_family(n: int, floor: float, gamma: float = 0.25) -> ModulusProfile:
    if not gamma > 0:
        raise ConfigError(f"log_spike needs gamma > 0, got {gamma}")
    psi = log_spike_circle(gamma, floor)
    return ModulusProfile(
        evaluator=lambda z: psi(np.angle(_first(z))),
        dimension=n, floor=floor, descriptor={"family": "log_spike", "gamma": gamma},
        circle_profile=psi, is_lift=True)


@family("lifted_1d", description="phi(zeta) = |O_psi(zeta_1)| for a 1-D base profile psi")
def lifted_1d_family(n: int, floor: float, base: str = "log_spike", **base_params: Any) -> ModulusProfile:
    if base == "lifted_1d":
        raise ConfigError("lifted_1d cannot lift itself")
    base_profile = make_modulus(base, base_params, n=1, floor=floor)
    descriptor = {"family": "lifted_1d", "base": base, **base_params}
    if n == 1:
        return ModulusProfile(base_profile.evaluator, 1, floor, descriptor,
                              base_profile.circle_profile, base_profile.singular_angle, True)

    from .outer import DiscOuterEvaluator
    disc = DiscOuterEvaluator(base_profile)
    edge = 1.0 - DEFAULTS.delta_min

    def evaluator(z: np.ndarray) -> np.ndarray:
        first = _first(z)
        values = np.empty(first.shape[0])
        on_edge = np.abs(first) > edge
        values[on_edge] = base_profile.circle_profile(np.angle(first[on_edge]))
        if np.any(~on_edge):
            values[~on_edge] = np.abs(disc.evaluate(first[~on_edge]))
        return values

    return ModulusProfile(evaluator, n, floor, descriptor, base_profile.circle_profile,
                          base_profile.singular_angle, True)


# --- HOELDER CONSTANT ---

@dataclass
class HolderCertificate:
    """Empirical ``C0 = sup |phi(t) - phi(point)| / d(t, point)^alpha``."""
    point: SpherePoint
    alpha: float
    c0: float
    sample_count: int
    shell_maxima: Tuple[float, ...] = ()
    diverging: bool = False


def holder_constant_at(phi: ModulusProfile, point: SpherePoint, alpha: float, count: int,
                       sampler: SeededSampler, shells: int = 16,
                       growth: float = 1.05) -> HolderCertificate:
    """Shell-stratified estimate of the pointwise Hoelder constant.

    Shell k holds points with ``2^-(k+1) < d(t, point) <= 2^-k`` (k = -1 covers
    ``(1, 2]``). ``diverging`` is set when the four innermost nonzero shell maxima
    each grow by more than ``growth``, which means no finite certificate exists.
    """
    if not 0 < alpha < 1:
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
    per_shell = max(count // (shells + 1), 1)
    centre_value = float(phi(point)[0])
    maxima: List[float] = []
    used = 0
    for index, k in enumerate(range(-1, shells)):
        outer_r = 2.0 ** -k
        points = sample_cap(point, outer_r, per_shell, sampler.spawn(index)).coords
        distance = niso_distance(points, point)
        points, distance = points[distance > outer_r / 2.0], distance[distance > outer_r / 2.0]
        used += distance.size
        if distance.size == 0:
            maxima.append(0.0)
            continue
        ratio = np.abs(phi(points) - centre_value) / distance ** alpha
        maxima.append(float(np.max(ratio)))

    nonzero = [m for m in maxima if m > 0]
    tail = nonzero[-4:]
    diverging = len(tail) == 4 and all(b > growth * a for a, b in zip(tail, tail[1:]))
    if diverging:
        logger.info("Hoelder ratio grows toward the point for alpha=%.3g: %s", alpha, tail)
    return HolderCertificate(point, alpha, max(maxima) if maxima else 0.0, used,
                             tuple(maxima), diverging)


# --- NORMS ---

@dataclass
class NormEstimate:
    """Monte-Carlo value of ``int |log phi|^p d sigma``."""
    value: float
    standard_error: float
    p: float
    sample_count: int
    clamp_fraction: float = 0.0
    clamp_dominated: bool = False


def log_lp_norm(phi: ModulusProfile, p: float, count: int, sampler: SeededSampler) -> NormEstimate:
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    points = sample_sphere(phi.dimension, count, sampler)
    raw = np.asarray(phi.evaluator(points.coords), dtype=float)
    clamped = raw < phi.floor
    values = np.abs(np.log(phi._clamp(raw))) ** p

    total = float(np.sum(values))
    clamp_mass = float(np.sum(values[clamped])) / total if total > 0 else 0.0
    dominated = clamp_mass > DEFAULTS.clamp_warning_fraction
    if dominated:
        logger.warning("log_lp_norm for %s: %.2f%% of the mass sits at the floor %.1e",
                       phi.name, 100 * clamp_mass, phi.floor)
    se = float(np.std(values, ddof=1) / math.sqrt(count)) if count > 1 else float('inf')
    return NormEstimate(float(np.mean(values)), se, p, count,
                        float(np.mean(clamped)), dominated)


def log_lp_norm_1d(psi, p: float, limit: int = 200, floor: float = None) -> float:
    """``(1/2 pi) int_T |log psi|^p d theta`` by adaptive quadrature.

    ``psi`` is a profile with a circle profile or a function of the angle.
    """
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    if isinstance(psi, ModulusProfile):
        circle = psi.circle
    else:
        low = DEFAULTS.floor if floor is None else floor
        circle = lambda theta: np.maximum(psi(np.asarray(theta, dtype=float)), low)

    def integrand(theta: float) -> float:
        return float(np.abs(np.log(circle(np.array([theta]))[0])) ** p)

    right, _ = integrate.quad(integrand, 0.0, math.pi, limit=limit)
    left, _ = integrate.quad(integrand, -math.pi, 0.0, limit=limit)
    return (left + right) / (2.0 * math.pi)


# --- SLICE CONSTANT ---

@dataclass
class SliceConstant:
    """Empirical ``sup_xi int_0^{2 pi} |log|f(xi e^{i theta})|| d theta`` over sampled directions."""
    value: float
    error_estimate: float
    worst_direction: SpherePoint
    directions: int
    angles: int
    clamped_nodes: int = 0
    refined: bool = False

    def __float__(self) -> float:
        return self.value


def _slice_directions(n: int, count: int, sampler: Optional[SeededSampler]) -> np.ndarray:
    fixed = np.eye(n, dtype=complex)
    if count <= n:
        return fixed[:max(count, 1)]
    if sampler is None:
        raise ConfigError("slice_constant needs a sampler for random directions")
    extra = sample_sphere(n, count - n, sampler).coords
    return np.vstack([fixed, extra])


def slice_constant(f, n: int = None, directions: int = None, angles: int = None,
                   sampler: SeededSampler = None, floor: float = None,
                   refine: int = None) -> SliceConstant:
    """Periodic trapezoid rule on every slice ``theta -> xi e^{i theta}``.

    Directions are the coordinate axes (including (1, 0, ..., 0)) followed by random
    ones. A node where ``|f|`` falls below ``floor`` has its cell replaced by the mean
    of ``refine`` midpoint subnodes; this is flagged on the result.
    """
    if isinstance(f, ModulusProfile):
        n = f.dimension if n is None else n
        floor = f.floor if floor is None else floor
        func = f.evaluator
    else:
        func = f
    if n is None:
        raise ConfigError("slice_constant needs the dimension n for a plain function")
    directions = DEFAULTS.slice_directions if directions is None else directions
    angles = DEFAULTS.slice_angles if angles is None else angles
    floor = DEFAULTS.floor if floor is None else floor
    refine = DEFAULTS.slice_refine if refine is None else refine
    if angles < 4 or angles % 2:
        raise ConfigError(f"angles must be an even count >= 4, got {angles}")

    def log_abs(points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        modulus = np.abs(np.asarray(func(points)))
        low = modulus < floor
        return np.abs(np.log(np.where(low, floor, modulus))), low

    h = 2.0 * math.pi / angles
    theta = h * np.arange(angles)
    rotation = np.exp(1j * theta)
    offsets = (np.arange(refine) + 0.5) / refine - 0.5

    def cell_mean(xi: np.ndarray, centre: float, width: float) -> float:
        sub = np.exp(1j * (centre + width * offsets))[:, np.newaxis] * xi[np.newaxis, :]
        return float(np.mean(log_abs(sub)[0]))

    best, best_error, best_dir = -1.0, 0.0, None
    clamped_total = 0
    for xi in _slice_directions(n, directions, sampler):
        points = rotation[:, np.newaxis] * xi[np.newaxis, :]
        values, low = log_abs(points)
        # the step-2h rule refines its own wider cells
        coarse_values = values[::2].copy()
        if np.any(low):
            clamped_total += int(np.count_nonzero(low))
            for k in np.flatnonzero(low):
                values[k] = cell_mean(xi, theta[k], h)
                if k % 2 == 0:
                    coarse_values[k // 2] = cell_mean(xi, theta[k], 2.0 * h)
        coarse = 2.0 * h * float(np.sum(coarse_values))
        total = h * float(np.sum(values))
        if total > best:
            best, best_error, best_dir = total, abs(total - coarse), xi

    if clamped_total:
        logger.info("slice_constant refined %d clamped node(s)", clamped_total)
    return SliceConstant(best, best_error, SpherePoint(best_dir), directions, angles,
                         clamped_total, clamped_total > 0)


@dataclass
class NormReport:
    """B_p and B_0 of one boundary function."""
    b_p: float
    b_p_error: float
    p: float
    q: float
    b_0: float
    b_0_error: float
    flags: List[str] = field(default_factory=list)


def norm_report(phi: ModulusProfile, p: float, count: int, sampler: SeededSampler,
                directions: int = None, angles: int = None) -> NormReport:
    norm = log_lp_norm(phi, p, count, sampler.spawn(0))
    slices = slice_constant(phi, directions=directions, angles=angles, sampler=sampler.spawn(1))
    flags = []
    if norm.clamp_dominated:
        flags.append("clamp_dominated")
    if slices.refined:
        flags.append("slice_refined")
    q = float('inf') if p == 1 else p / (p - 1.0)
    return NormReport(norm.value, norm.standard_error, p, q, slices.value,
                      slices.error_estimate, flags)


__all__ = [
    "ModulusProfile", "FamilyInfo", "FamilyRegistry", "family", "list_families", "make_modulus",
    "log_spike_circle", "HolderCertificate", "holder_constant_at", "NormEstimate", "log_lp_norm",
    "log_lp_norm_1d", "SliceConstant", "slice_constant", "NormReport", "norm_report",
]
