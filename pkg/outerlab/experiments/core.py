"""Run state and step pipelines for scenario runners.

A runner is a chain of steps, each taking and returning a :class:`Run`:

    disc_pipeline = Pipeline() | build_profile | build_disc_function | measure_oscillation | fit_profile

Chaining two complete pipelines with ``|`` makes the second one a fallback that is
tried, on a fresh copy of the input run, when the first raises an outerlab error.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional, Union

from ..boundary import ModulusProfile, make_modulus
from ..errors import OuterLabError
from ..oscillation import (ExponentFit, OscillationEstimate, fit_exponent, oscillation_profile,
                           theorem_exponent)
from ..sphere import SeededSampler, SpherePoint
from .report import lower_bound_verdict
from .scenario import Scenario

logger = logging.getLogger(__name__)


@dataclass
class Run:
    """Everything a runner accumulates for one scenario."""
    scenario: Scenario
    sampler: SeededSampler
    profile: Optional[ModulusProfile] = None
    function: Optional[Callable] = None
    estimates: List[OscillationEstimate] = field(default_factory=list)
    fit: Optional[ExponentFit] = None
    predicted: Optional[float] = None
    measured: Optional[float] = None
    halfwidth: Optional[float] = None
    verdict: Optional[str] = None
    evidence: str = "measurement"
    constants: Dict[str, Any] = field(default_factory=dict)
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    pipeline: List[str] = field(default_factory=list)

    def fork(self) -> 'Run':
        """A copy with its own containers, used before trying a fallback."""
        return replace(self, estimates=list(self.estimates), constants=dict(self.constants),
                       diagnostics=dict(self.diagnostics), notes=list(self.notes),
                       pipeline=list(self.pipeline))

    def __or__(self, step: Union[Callable, 'Pipeline']) -> 'Run':
        if isinstance(step, Pipeline):
            return step(self)
        result = step(self)
        if result is None:
            result = self
        result.pipeline.append(getattr(step, '__name__', str(step)))
        return result


class Pipeline:
    """A callable chain of run steps with optional fallback pipelines."""

    def __init__(self, steps: List[Callable] = None, fallback_pipelines: List['Pipeline'] = None):
        self.steps = steps or []
        self.fallback_pipelines = fallback_pipelines or []

    def __or__(self, other: Union[Callable, 'Pipeline']) -> 'Pipeline':
        if isinstance(other, Pipeline):
            if self.steps and other.steps:
                return Pipeline(self.steps, self.fallback_pipelines + [other])
            if not self.steps:
                return other
            return Pipeline(self.steps + other.steps, other.fallback_pipelines)
        return Pipeline(self.steps + [other], self.fallback_pipelines)

    def __call__(self, run: Run) -> Run:
        try:
            return self._execute_steps(run.fork(), self.steps)
        except OuterLabError as exc:
            for fallback in self.fallback_pipelines:
                logger.warning("%s failed for scenario '%s' (%s); falling back to %r",
                               self, run.scenario.name, exc, fallback)
                try:
                    result = fallback(run)
                    result.notes.append(f"fallback after {type(exc).__name__}: {exc}")
                    return result
                except OuterLabError:
                    continue
            raise

    def _execute_steps(self, run: Run, steps: List[Callable]) -> Run:
        for step in steps:
            run = run | step
        return run

    def __repr__(self) -> str:
        step_names = [getattr(step, '__name__', str(step)) for step in self.steps]
        main_pipeline = f"Pipeline({' | '.join(step_names)})"
        if self.fallback_pipelines:
            fallback_names = [repr(fp) for fp in self.fallback_pipelines]
            return f"{main_pipeline} with fallbacks: [{', '.join(fallback_names)}]"
        return main_pipeline


# --- SHARED STEPS ---

def build_profile(run: Run) -> Run:
    s = run.scenario
    run.profile = make_modulus(s.family, s.family_params(), n=s.n, floor=s.floor)
    run.diagnostics["profile"] = dict(run.profile.descriptor)
    return run


def measure_oscillation(run: Run) -> Run:
    s = run.scenario
    run.estimates = oscillation_profile(
        run.function, SpherePoint.one(s.n), s.radii, s.count, run.sampler.spawn(1),
        dilation=s.dilation, threads=s.threads, method=s.method)
    run.diagnostics["oscillation"] = [
        {"radius": e.radius, "nu": e.nu, "standard_error": e.standard_error,
         "count": e.sample_count, "flags": list(e.flags)}
        for e in run.estimates]
    return run


def fit_profile(run: Run) -> Run:
    run.fit = fit_exponent(run.estimates, weighted=run.scenario.weighted)
    run.measured = run.fit.slope
    run.halfwidth = run.fit.confidence_halfwidth
    if run.fit.dropped:
        run.diagnostics["dropped_scales"] = [list(item) for item in run.fit.dropped]
    run.notes.append("slope read as the asymptotic 'in average' Hoelder rate at the point; "
                     "it says nothing about the constant")
    return run


def predict(run: Run) -> Run:
    s = run.scenario
    if s.predict is not None:
        run.predicted = s.predict
        run.notes.append("predicted exponent overridden by the scenario")
    else:
        run.predicted = theorem_exponent(s.tag, s.alpha, s.p, s.n)
    return run


def judge(run: Run) -> Run:
    run.verdict = lower_bound_verdict(run.measured, run.predicted, run.halfwidth,
                                      run.scenario.tolerance)
    return run


def record_clamps(run: Run) -> Run:
    if run.profile is not None:
        run.diagnostics["clamp_events"] = run.profile.clamp_events
        run.diagnostics["clamp_fraction"] = run.profile.clamp_fraction
    return run


__all__ = ["Run", "Pipeline", "build_profile", "measure_oscillation", "fit_profile", "predict",
           "judge", "record_clamps"]
