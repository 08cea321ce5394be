"""Verdict rules, per-scenario reports and the CSV summary."""

import json
import logging
import math
import platform
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Sequence

import numpy as np

from ..config import DEFAULTS

if TYPE_CHECKING:
    from .core import Run
    from .scenario import Scenario

logger = logging.getLogger(__name__)

VERDICTS = ("consistent", "violation", "inconclusive")
SUMMARY_COLUMNS = ["scenario", "tag", "predicted", "measured", "halfwidth", "verdict"]
NOISE_LIMIT = 0.5


def _usable(halfwidth: Optional[float]) -> bool:
    return halfwidth is not None and math.isfinite(halfwidth) and halfwidth <= NOISE_LIMIT


def lower_bound_verdict(measured: float, predicted: float, halfwidth: float,
                        tolerance: float = None) -> str:
    """Violation only when the slope sits below the prediction by more than its error bar."""
    tolerance = DEFAULTS.verdict_tolerance if tolerance is None else tolerance
    if measured is None or not _usable(halfwidth):
        return "inconclusive"
    if measured < predicted - (halfwidth + tolerance):
        return "violation"
    return "consistent"


def sharpness_verdict(measured: float, lower: float, upper: float, halfwidth: float,
                      tolerance: float = None) -> str:
    """One-sided check that the slope does not exceed ``upper``.

    Falling below ``lower`` contradicts the guaranteed exponent and is a violation.
    """
    tolerance = DEFAULTS.verdict_tolerance if tolerance is None else tolerance
    if measured is None or not _usable(halfwidth):
        return "inconclusive"
    if measured < lower - (halfwidth + tolerance):
        return "violation"
    if measured <= upper + halfwidth + tolerance:
        return "consistent"
    return "inconclusive"


def two_sided_verdict(measured: float, predicted: float, halfwidth: float,
                      tolerance: float = None, relative: float = 0.05) -> str:
    tolerance = DEFAULTS.verdict_tolerance if tolerance is None else tolerance
    if measured is None or halfwidth is None or math.isnan(halfwidth):
        return "inconclusive"
    slack = (halfwidth if math.isfinite(halfwidth) else 0.0) + max(tolerance, relative * abs(predicted))
    return "consistent" if abs(measured - predicted) <= slack else "violation"


def versions() -> Dict[str, str]:
    import scipy
    from .. import __version__
    return {"outerlab": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def _jsonable(value: Any) -> Any:
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (set, tuple)):
        return list(value)
    return str(value)


@dataclass
class Report:
    """Outcome of one scenario, with enough of the scenario to re-run it."""
    name: str
    tag: str
    scenario: Dict[str, Any]
    scenario_line: str
    predicted: Optional[float] = None
    measured: Optional[float] = None
    halfwidth: Optional[float] = None
    verdict: str = "inconclusive"
    evidence: str = "measurement"
    intercept: Optional[float] = None
    fit: Optional[Dict[str, Any]] = None
    constants: Dict[str, Any] = field(default_factory=dict)
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    wall_clock: float = 0.0
    versions: Dict[str, str] = field(default_factory=dict)
    error: Optional[str] = None

    @classmethod
    def from_run(cls, run: 'Run', wall_clock: float) -> 'Report':
        s = run.scenario
        return cls(
            name=s.name, tag=s.tag, scenario=s.to_dict(), scenario_line=s.to_line(),
            predicted=run.predicted, measured=run.measured, halfwidth=run.halfwidth,
            verdict=run.verdict or "inconclusive", evidence=run.evidence,
            intercept=run.fit.intercept if run.fit is not None else None,
            fit=run.fit.to_dict() if run.fit is not None else None,
            constants=dict(run.constants), diagnostics=dict(run.diagnostics),
            notes=list(run.notes), wall_clock=wall_clock, versions=versions())

    @classmethod
    def failed(cls, scenario: 'Scenario', error: BaseException, wall_clock: float = 0.0) -> 'Report':
        return cls(name=scenario.name, tag=scenario.tag, scenario=scenario.to_dict(),
                   scenario_line=scenario.to_line(), verdict="error", error=str(error),
                   wall_clock=wall_clock, versions=versions())

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, default=_jsonable)

    def summary_row(self) -> Dict[str, Any]:
        return {"scenario": self.name, "tag": self.tag, "predicted": self.predicted,
                "measured": self.measured, "halfwidth": self.halfwidth, "verdict": self.verdict}


def summary_frame(reports: Sequence[Report]):
    """One row per report, in scenario order."""
    try:
        import pandas as pd
    except ImportError:
        raise ImportError("pandas is required for suite summaries. Install with: pip install pandas")
    return pd.DataFrame([r.summary_row() for r in reports], columns=SUMMARY_COLUMNS)


def summary_csv(reports: Sequence[Report]) -> str:
    """CSV text with floats at a fixed 12 significant digits."""
    fmt = f"%.{DEFAULTS.float_digits}g"
    return summary_frame(reports).to_csv(index=False, float_format=fmt)


def write_reports(reports: Sequence[Report], out_dir: str) -> Path:
    """Write ``<name>.json`` per report and ``summary.csv`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for report in reports:
        (out / f"{report.name}.json").write_text(report.to_json() + "\n", encoding="utf-8")
    summary = out / "summary.csv"
    summary.write_text(summary_csv(reports), encoding="utf-8")
    logger.info("wrote %d report(s) and %s", len(reports), summary)
    return summary


__all__ = ["VERDICTS", "Report", "lower_bound_verdict", "sharpness_verdict", "two_sided_verdict",
           "summary_frame", "summary_csv", "write_reports", "versions"]
