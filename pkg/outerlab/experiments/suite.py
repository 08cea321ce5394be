"""Config-driven batches of scenarios.

A suite file holds ``key: value`` settings (defaults for every scenario), scenario
lines and ``#`` comments::

    # disc checks
    seed: 7
    radii: 2^-3..2^-10
    scenario disc-B[tag:B][family:power][beta:0.5][alpha:0.5]
    scenario balance[tag:balance][alpha:0.5]
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

from ..errors import ConfigError, ScenarioError
from .report import Report, summary_csv, write_reports
from .scenario import Scenario, coerce_settings, parse_scenario

logger = logging.getLogger(__name__)


@dataclass
class SuiteResult:
    reports: List[Report] = field(default_factory=list)

    @property
    def summary(self) -> str:
        return summary_csv(self.reports)

    @property
    def violations(self) -> List[Report]:
        return [r for r in self.reports if r.verdict == "violation"]

    @property
    def errors(self) -> List[Report]:
        return [r for r in self.reports if r.verdict == "error"]

    @property
    def exit_code(self) -> int:
        if self.errors:
            return 2
        if self.violations:
            return 1
        return 0


def parse_suite(text: str) -> Tuple[Dict[str, Any], List[Scenario]]:
    """Split suite text into settings and validated scenarios (in file order)."""
    raw_settings: Dict[str, str] = {}
    scenario_lines: List[Tuple[int, str]] = []
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("scenario ") or line == "scenario":
            scenario_lines.append((number, line))
        elif ":" in line:
            key, value = line.split(":", 1)
            raw_settings[key.strip()] = value.strip()
        else:
            raise ConfigError(f"line {number}: expected 'key: value' or 'scenario NAME[...]', got {line!r}")

    settings = coerce_settings(raw_settings, "suite settings: ")
    scenarios = []
    names = set()
    for number, line in scenario_lines:
        try:
            scenario = parse_scenario(line, settings)
        except ConfigError as exc:
            raise ConfigError(f"line {number}: {exc}") from exc
        if scenario.name in names:
            raise ConfigError(f"line {number}: duplicate scenario name '{scenario.name}'")
        names.add(scenario.name)
        scenarios.append(scenario)
    return settings, scenarios


def load_suite(path: Union[str, Path]) -> Tuple[Dict[str, Any], List[Scenario]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read suite config {path}: {exc}") from exc
    return parse_suite(text)


def run_suite(config: Union[str, Path] = None, text: str = None, seed: int = None,
              threads: int = 1, out_dir: Union[str, Path] = None) -> SuiteResult:
    """Run every scenario of a suite; reports come back in file order.

    ``seed`` overrides the seed of every scenario. A scenario that fails becomes an
    ``error`` report and the rest still run.
    """
    from . import run_scenario

    if (config is None) == (text is None):
        raise ConfigError("run_suite needs exactly one of config or text")
    _, scenarios = parse_suite(text) if text is not None else load_suite(config)
    if seed is not None:
        scenarios = [replace(s, seed=seed) for s in scenarios]

    def one(scenario: Scenario) -> Report:
        try:
            return run_scenario(scenario)
        except ScenarioError as exc:
            logger.warning("%s", exc)
            return Report.failed(scenario, exc)

    if threads > 1 and len(scenarios) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(one, scenarios))
    else:
        reports = [one(s) for s in scenarios]

    result = SuiteResult(reports)
    if out_dir is not None:
        write_reports(reports, out_dir)
    logger.info("suite finished: %d scenario(s), %d violation(s), %d error(s)",
                len(reports), len(result.violations), len(result.errors))
    return result


__all__ = ["SuiteResult", "parse_suite", "load_suite", "run_suite"]
