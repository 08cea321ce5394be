"""Runners for the disc theorems (tags A, B and KVM).

The outer function of psi is evaluated by quadrature and its mean oscillation is
measured on arcs of T around 1.
"""

import logging
import math

from ..boundary import log_lp_norm_1d
from ..matchers import disc_match
from ..outer import DiscOuterEvaluator
from . import runner
from .core import (Pipeline, Run, build_profile, fit_profile, judge, measure_oscillation,
                   predict, record_clamps)

logger = logging.getLogger(__name__)


def build_disc_function(run: Run) -> Run:
    run.function = DiscOuterEvaluator(run.profile)
    return run


def disc_constants(run: Run) -> Run:
    s = run.scenario
    run.constants["log_l1"] = 2.0 * math.pi * log_lp_norm_1d(run.profile, 1.0)
    if s.tag == "KVM":
        run.constants["B_p"] = log_lp_norm_1d(run.profile, s.p)
        run.constants["q"] = s.p / (s.p - 1.0)
    if s.tag == "A":
        run.notes.append("pointwise Hoelder continuity measured through its mean-oscillation "
                         "surrogate on arcs at 1")
    return run


disc_pipeline = (Pipeline() | build_profile | build_disc_function | measure_oscillation
                 | fit_profile | predict | judge | disc_constants | record_clamps)


@runner(match=disc_match, description="Oscillation decay of a disc outer function on arcs at 1")
def disc_runner(run: Run) -> Run:
    return disc_pipeline(run)
