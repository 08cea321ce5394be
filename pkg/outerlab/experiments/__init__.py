"""
Scenario runners and the registry that dispatches scenarios to them.

Runners are registered with a matcher, exactly one primary runner per kind of
scenario plus optional named runners that take over when their matcher fires:

    @runner(match=disc_match)
    def disc_runner(run):                       # primary runner for disc tags
        return disc_pipeline(run)

    @runner(match=mc_ball_match, name="ball_mc")
    def ball_mc_runner(run):                    # specialized runner
        return ball_mc_pipeline(run)

Usage:
    from outerlab.experiments import run_scenario, parse_scenario
    report = run_scenario(parse_scenario("scenario b[tag:B][beta:0.5][alpha:0.5]"))
    report.verdict

    from outerlab.experiments import runners
    runners.ball_mc(run)                         # call a runner by name
"""

import logging
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

from ..errors import OuterLabError, ScenarioError
from ..sphere import SeededSampler
from .core import Pipeline, Run
from .report import Report
from .scenario import Scenario, parse_scenario

logger = logging.getLogger(__name__)


@dataclass
class RunnerInfo:
    """Information about a registered runner."""
    match_fn: Callable[[Scenario], bool]
    run_fn: Callable[[Run], Run]
    name: Optional[str] = None
    is_primary: bool = False
    description: str = ""


class RunnerRegistry:
    """Registry for scenario runners."""

    def __init__(self):
        self._runners: List[RunnerInfo] = []

    def register(self, match_fn: Callable, run_fn: Callable,
                 name: Optional[str] = None, description: str = ""):
        is_primary = name is None
        info = RunnerInfo(
            match_fn=match_fn,
            run_fn=run_fn,
            name=name or run_fn.__name__,
            is_primary=is_primary,
            description=description or run_fn.__doc__ or "",
        )
        self._runners.append(info)

    def find_runner(self, scenario: Scenario) -> Optional[RunnerInfo]:
        """Named runners win over primary ones; the first registered match is used."""
        for info in self._runners:
            if not info.is_primary and info.match_fn(scenario):
                return info
        for info in self._runners:
            if info.is_primary and info.match_fn(scenario):
                return info
        return None

    def find_named(self, name: str) -> Optional[RunnerInfo]:
        for info in self._runners:
            if info.name == name:
                return info
        return None

    def list_runners(self) -> Dict[str, str]:
        return {info.name: info.description.strip() for info in self._runners}


_runner_registry = RunnerRegistry()


def runner(match: Callable[[Scenario], bool], name: Optional[str] = None, description: str = ""):
    """
    Decorator to register a runner.

    Args:
        match: Function telling whether this runner handles the scenario
        name: Optional name for specialized runners (None = primary)
        description: What the runner measures
    """
    def decorator(func: Callable):
        _runner_registry.register(match_fn=match, run_fn=func, name=name, description=description)
        return func
    return decorator


def list_available_runners() -> Dict[str, str]:
    return _runner_registry.list_runners()


class RunnerNamespace:
    """Namespace for accessing runners by name."""

    def __getattr__(self, name: str):
        info = _runner_registry.find_named(name)
        if info is not None:
            return info.run_fn
        raise AttributeError(f"No runner named '{name}' found")

    def __dir__(self):
        return sorted(info.name for info in _runner_registry._runners)


runners = RunnerNamespace()


def run_scenario(scenario: Scenario, sampler: SeededSampler = None) -> Report:
    """Run one scenario and build its report.

    Module errors are re-raised as :class:`ScenarioError` naming the scenario.
    """
    scenario.validate()
    info = _runner_registry.find_runner(scenario)
    if info is None:
        raise ScenarioError(scenario.name, LookupError(f"no runner handles tag '{scenario.tag}'"))
    sampler = SeededSampler(scenario.seed) if sampler is None else sampler
    run = Run(scenario, sampler)
    logger.info("running scenario '%s' (tag %s) with %s", scenario.name, scenario.tag, info.name)
    start = time.perf_counter()
    try:
        run = info.run_fn(run)
    except OuterLabError as exc:
        raise ScenarioError(scenario.name, exc) from exc
    return Report.from_run(run, time.perf_counter() - start)


# Import runner modules to register them
from . import disc as _disc_module  # noqa: E402
from . import ball as _ball_module  # noqa: E402
from . import checks as _checks_module  # noqa: E402
from .suite import SuiteResult, parse_suite, run_suite  # noqa: E402

__all__ = ["Scenario", "parse_scenario", "Run", "Pipeline", "Report", "runner", "runners",
           "run_scenario", "list_available_runners", "SuiteResult", "parse_suite", "run_suite"]
