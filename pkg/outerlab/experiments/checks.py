"""Runners for the auxiliary checks: kernel difference, Poisson L^q growth, slice constant
and exponent balancing."""

import logging
import math

from ..boundary import slice_constant
from ..kernels import kernel_diff_bound_check, poisson_lq_scaling
from ..matchers import balance_match, kernel_match, poisson_match, slice_match
from ..oscillation import balance_exponents, theorem_exponent
from ..sphere import NonisotropicBall, SpherePoint
from . import runner
from .core import Pipeline, Run, build_profile, record_clamps
from .report import two_sided_verdict

logger = logging.getLogger(__name__)

KERNEL_PAIRS = 10_000
SCALE_SPREAD = 2.0


def kernel_constants(run: Run) -> Run:
    s = run.scenario
    pairs = KERNEL_PAIRS if s.count == "auto" else s.count
    centre = SpherePoint.one(s.n)
    per_j = {}
    for i, radius in enumerate(s.radii):
        for j in s.j:
            if 2.0 ** (j + 1) * radius > 2.0:
                run.notes.append(f"annulus j={j} is empty at l={radius:g}; skipped")
                continue
            constant = kernel_diff_bound_check(NonisotropicBall(centre, radius), j, pairs,
                                               run.sampler.spawn(i, j), s.normalization)
            run.constants[f"l={radius:g},j={j}"] = constant
            per_j.setdefault(j, []).append(constant)

    spreads = {j: max(v) / min(v) for j, v in per_j.items() if len(v) > 1 and min(v) > 0}
    run.diagnostics["scale_spread"] = {str(j): spread for j, spread in spreads.items()}
    run.diagnostics["normalization"] = s.normalization
    if spreads and all(spread <= SCALE_SPREAD for spread in spreads.values()):
        run.verdict = "consistent"
    else:
        run.verdict = "inconclusive"
    run.evidence = "recorded constants"
    run.notes.append("the implied constant is measured, not bounded; stability is checked "
                     "across scales at fixed annulus index")
    return run


def poisson_growth(run: Run) -> Run:
    s = run.scenario
    run.fit = poisson_lq_scaling(s.q, [1.0 - gap for gap in s.radii])
    run.measured = run.fit.slope
    run.halfwidth = run.fit.confidence_halfwidth
    run.predicted = s.predict if s.predict is not None else s.q - 1.0
    run.verdict = two_sided_verdict(run.measured, run.predicted, run.halfwidth, s.tolerance)
    run.notes.append("scales of the fit are 1/(1 - r)")
    return run


def slice_certificate(run: Run) -> Run:
    s = run.scenario
    slices = slice_constant(run.profile, directions=s.directions, angles=s.angles,
                            sampler=run.sampler.spawn(4))
    run.constants["B_0"] = slices.value
    run.constants["B_0_error"] = slices.error_estimate
    run.constants["worst_direction"] = [complex(c) for c in slices.worst_direction.coords]
    run.diagnostics["slice_refined_nodes"] = slices.clamped_nodes
    if not math.isfinite(slices.value):
        run.verdict = "violation"
    elif slices.error_estimate <= 0.1 * max(1.0, slices.value):
        run.verdict = "consistent"
    else:
        run.verdict = "inconclusive"
    run.evidence = "empirical supremum over sampled directions"
    return run


def balance_check(run: Run) -> Run:
    s = run.scenario
    balance = balance_exponents(s.alpha)
    run.measured = balance.gamma
    run.halfwidth = 0.0
    run.predicted = s.predict if s.predict is not None else theorem_exponent("balance", s.alpha)
    run.constants["small_modulus_exponent"] = balance.small_modulus_exponent
    run.constants["large_modulus_exponent"] = balance.large_modulus_exponent
    agree = math.isclose(balance.small_modulus_exponent, balance.large_modulus_exponent,
                         rel_tol=0, abs_tol=1e-12)
    close = abs(balance.gamma - run.predicted) <= s.tolerance
    run.verdict = "consistent" if agree and close else "violation"
    run.evidence = "algebra"
    return run


@runner(match=kernel_match, description="Normalized kernel differences on dyadic annuli")
def kernel_runner(run: Run) -> Run:
    return (Pipeline() | kernel_constants)(run)


@runner(match=poisson_match, description="Growth exponent of ||P_r||_q^q in 1/(1 - r)")
def poisson_runner(run: Run) -> Run:
    return (Pipeline() | poisson_growth)(run)


@runner(match=slice_match, description="Empirical slice constant B_0 of the profile")
def slice_runner(run: Run) -> Run:
    return (Pipeline() | build_profile | slice_certificate | record_clamps)(run)


@runner(match=balance_match, description="Threshold exponent balancing the two modulus regimes")
def balance_runner(run: Run) -> Run:
    return (Pipeline() | balance_check)(run)
