import math

import numpy as np
import pytest

from outerlab.errors import ConfigError, DomainError, FitError
from outerlab.outer import DiscOuterEvaluator
from outerlab.oscillation import (auto_count, balance_exponents, fit_exponent, fit_loglog,
                                  geometric_median, mean_oscillation, oscillation_profile, p1_check,
                                  sharpness_exponent, theorem1_exponent, theorem_exponent,
                                  young_exponent)
from outerlab.sphere import SpherePoint


def mean_distance(values, pivot):
    return np.mean(np.abs(values - pivot))


# --- geometric median ---

@pytest.mark.parametrize("seed", [0, 1, 2])
def test_median_beats_a_brute_force_grid(seed):
    rng = np.random.default_rng(seed)
    values = rng.standard_normal(7) + 1j * rng.standard_normal(7)
    pivot, converged = geometric_median(values)
    assert converged
    axis = np.linspace(-3, 3, 301)
    grid = (axis[:, None] + 1j * axis[None, :]).ravel()
    best = min(mean_distance(values, g) for g in grid)
    assert mean_distance(values, pivot) <= best + 1e-9


def zoomed_grid_minimum(values, levels=12, points=41):
    """Smallest mean distance found by repeatedly refining a grid around its best node."""
    centre = complex(np.mean(values))
    half = float(np.max(np.abs(values - centre)))
    best = mean_distance(values, centre)
    offsets = np.linspace(-1.0, 1.0, points)
    for _ in range(levels):
        grid = (centre + half * (offsets[:, None] + 1j * offsets[None, :])).ravel()
        objective = np.mean(np.abs(values[None, :] - grid[:, None]), axis=1)
        k = int(np.argmin(objective))
        centre, best = grid[k], min(best, float(objective[k]))
        half *= 4.0 / (points - 1)
    return best


def test_median_matches_a_grid_search_on_many_small_sets():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        size = int(rng.integers(3, 13))
        values = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        pivot, _ = geometric_median(values)
        assert mean_distance(values, pivot) <= zoomed_grid_minimum(values) * (1 + 1e-6)


def test_median_is_equivariant(rng):
    values = rng.standard_normal(40) + 1j * rng.standard_normal(40)
    pivot, _ = geometric_median(values)
    shifted, _ = geometric_median(values + (3 - 2j))
    scaled, _ = geometric_median(2.5 * values)
    assert shifted == pytest.approx(pivot + (3 - 2j), abs=1e-8)
    assert scaled == pytest.approx(2.5 * pivot, abs=1e-8)


def test_median_can_sit_on_a_sample_point():
    pivot, converged = geometric_median([0, 0, 0, 1, -1, 1j])
    assert converged
    assert abs(pivot) < 1e-8


def test_median_needs_values():
    with pytest.raises(ConfigError):
        geometric_median([])


# --- mean oscillation ---

def test_constant_values_do_not_oscillate():
    estimate = mean_oscillation(np.full(50, 2 + 1j))
    assert estimate.nu == 0.0
    assert estimate.pivot == 2 + 1j


def test_oscillation_of_symmetric_values():
    values = np.tile([1, -1, 1j, -1j], 10)
    estimate = mean_oscillation(values)
    assert estimate.nu == pytest.approx(1.0)
    assert abs(estimate.pivot) < 1e-12
    assert estimate.nu <= estimate.nu_mean_pivot + 1e-12


def test_oscillation_ignores_translation_and_scales_with_the_values(rng):
    values = rng.standard_normal(60) + 1j * rng.standard_normal(60)
    base = mean_oscillation(values)
    assert mean_oscillation(values + (4 - 7j)).nu == pytest.approx(base.nu, rel=1e-9)
    assert mean_oscillation(3.5 * values).nu == pytest.approx(3.5 * base.nu, rel=1e-9)
    assert mean_oscillation(1j * values).nu == pytest.approx(base.nu, rel=1e-9)


def test_mean_pivot_is_within_twice_the_median_oscillation(rng):
    for size in (30, 50, 200):
        values = np.exp(rng.standard_normal(size)) * np.exp(1j * rng.uniform(0, 0.5, size))
        estimate = mean_oscillation(values)
        assert estimate.nu <= estimate.nu_mean_pivot + 1e-12
        assert estimate.nu_mean_pivot <= 2 * estimate.nu + 1e-12


def test_oscillation_needs_enough_samples():
    with pytest.raises(ConfigError):
        mean_oscillation(np.arange(10))


def test_auto_count_is_clamped():
    assert auto_count(1.0, 2) == 1000
    assert auto_count(2.0 ** -12, 2) == 20_000
    assert auto_count(2.0 ** -10, 1, cap=10**6) == math.ceil(50 * 2 ** 5)


# --- fitting ---

def test_fit_recovers_a_noisy_power_law():
    radii = [2.0 ** -k for k in range(3, 11)]
    noise = [1.05 if i % 2 == 0 else 0.95 for i in range(len(radii))]
    fit = fit_loglog(radii, [r ** 0.25 * e for r, e in zip(radii, noise)])
    assert abs(fit.slope - 0.25) < 0.03
    assert fit.r_squared > 0.99
    assert math.isfinite(fit.confidence_halfwidth)


def test_fit_of_an_exact_power_law():
    radii = [2.0 ** -k for k in range(2, 8)]
    fit = fit_loglog(radii, [3.0 * r ** 0.7 for r in radii])
    assert fit.slope == pytest.approx(0.7, abs=1e-12)
    assert math.exp(fit.intercept) == pytest.approx(3.0)
    assert fit.confidence_halfwidth == pytest.approx(0.0, abs=1e-9)


def test_fit_drops_unusable_scales():
    radii = [2.0 ** -k for k in range(2, 9)]
    values = [r ** 0.5 for r in radii]
    errors = [0.0] * len(radii)
    values[1] = 0.0
    errors[4] = values[4]
    fit = fit_loglog(radii, values, errors)
    assert sorted(reason for _, reason in fit.dropped) == ["noise", "nonpositive"]
    assert len(fit.radii) == 5
    assert fit.slope == pytest.approx(0.5)


def test_fit_needs_enough_scales():
    with pytest.raises(FitError):
        fit_loglog([0.5, 0.25, 0.125, 0.0625], [1.0, 0.5, 0.0, -1.0])


def test_weighted_fit_needs_standard_errors():
    radii = [2.0 ** -k for k in range(2, 8)]
    with pytest.raises(ConfigError):
        fit_loglog(radii, radii, weighted=True)


def test_weighted_fit_of_an_exact_power_law():
    radii = [2.0 ** -k for k in range(2, 8)]
    values = [r ** 0.4 for r in radii]
    fit = fit_loglog(radii, values, [0.01 * v for v in values], weighted=True)
    assert fit.weighted
    assert fit.slope == pytest.approx(0.4)


# --- exponent algebra ---

def test_balance_halves_alpha():
    balance = balance_exponents(2.0 / 3.0)
    assert float(balance) == pytest.approx(1.0 / 3.0)
    assert balance.small_modulus_exponent == pytest.approx(balance.large_modulus_exponent)


def test_theorem1_exponent():
    assert theorem1_exponent(0.5, 4.0, 2) == pytest.approx(1.0 / 3.0)
    assert theorem1_exponent(0.5, math.inf, 3) == 0.5
    with pytest.raises(DomainError):
        theorem1_exponent(0.5, 1.0, 2)


def test_young_exponent_and_p1():
    q = young_exponent(4.0, 2, 0.1)
    assert 1.0 / q == pytest.approx(1.25 - 1.0 / 2.1)
    assert p1_check(4.0, 2, 0.1) == pytest.approx(0.4 / 4.2 - 1.0)
    with pytest.raises(DomainError):
        young_exponent(2.0, 2, 0.1)


def test_theorem1_exponent_forms_agree_on_random_inputs():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        alpha = float(rng.uniform(0.01, 0.99))
        p = float(rng.uniform(1.01, 60.0))
        n = int(rng.integers(1, 6))
        q = p / (p - 1.0)
        value = theorem1_exponent(alpha, p, n)
        assert value == pytest.approx(alpha * p / (p + n), rel=1e-12)
        assert value == pytest.approx(alpha / (n + 1.0 - n / q), rel=1e-12)


def test_p1_stays_above_minus_one_on_random_inputs():
    rng = np.random.default_rng(8)
    for _ in range(1000):
        n = int(rng.integers(2, 6))
        p = n + float(rng.uniform(0.01, 50.0))
        eps = float(rng.uniform(1e-3, 1.0))
        p1 = p1_check(p, n, eps)
        assert p1 > -1.0
        assert p1 == pytest.approx(n * n * eps / (p + n * eps) - 1.0, rel=1e-10, abs=1e-12)


def test_sharpness_exponent():
    assert sharpness_exponent(0.5, 4.0, 2, 0.1) == pytest.approx(0.5 * 2.1 / 3.1)


@pytest.mark.parametrize("tag,expected", [
    ("A", 0.25), ("B", 0.25), ("T2", 0.25), ("balance", 0.25),
    ("KVM", 0.375), ("T1", 0.3), ("T4-sharpness", 0.3),
])
def test_predicted_exponents(tag, expected):
    assert theorem_exponent(tag, 0.5, p=3.0, n=2) == pytest.approx(expected)


def test_predicted_exponent_errors():
    with pytest.raises(ConfigError):
        theorem_exponent("T9", 0.5)
    with pytest.raises(DomainError):
        theorem_exponent("A", 1.0)


# --- profiles ---

def boundary_root(coords):
    return (1.0 - coords[:, 0]) ** 0.5


def test_profile_rejects_bad_radii(sampler):
    center = SpherePoint.one(1)
    with pytest.raises(ConfigError):
        oscillation_profile(boundary_root, center, [0.5, 0.5, 0.25], 100, sampler)
    with pytest.raises(ConfigError):
        oscillation_profile(boundary_root, center, [3.0, 0.5], 100, sampler)


def test_profile_of_a_square_root_has_exponent_one_half(sampler):
    radii = [2.0 ** -k for k in range(3, 10)]
    profile = oscillation_profile(boundary_root, SpherePoint.one(1), radii, 2000, sampler)
    assert [e.sample_count for e in profile] == [2000] * len(radii)
    fit = fit_exponent(profile)
    assert fit.slope == pytest.approx(0.5, abs=0.05)


def test_profile_through_the_outer_evaluator(sampler, power_disc):
    radii = [2.0 ** -k for k in range(3, 9)]
    profile = oscillation_profile(DiscOuterEvaluator(power_disc), SpherePoint.one(1), radii, 1000,
                                  sampler)
    assert fit_exponent(profile).slope == pytest.approx(0.5, abs=0.06)


def test_profile_does_not_depend_on_threads(sampler):
    radii = [2.0 ** -k for k in range(3, 8)]
    serial = oscillation_profile(boundary_root, SpherePoint.one(1), radii, 500, sampler)
    pooled = oscillation_profile(boundary_root, SpherePoint.one(1), radii, 500, sampler, threads=3)
    assert [e.nu for e in serial] == [e.nu for e in pooled]
