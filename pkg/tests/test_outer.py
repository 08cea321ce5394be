import math

import numpy as np
import pytest

from outerlab.boundary import make_modulus
from outerlab.errors import ConfigError, DomainError, PrecisionError
from outerlab.outer import (BallOuterEvaluator, DiscOuterEvaluator, ball_outer, ball_outer_from_lift,
                            boundary_value, disc_outer, lift_to_ball, radial_dilate, slice_integral)
from outerlab.sphere import SeededSampler, sample_sphere


# --- disc ---

@pytest.mark.parametrize("z", [0.0, 0.3, 0.5j, 0.7 * np.exp(2.0j)])
def test_outer_of_distance_to_one(z):
    psi = make_modulus("power", {"beta": 1.0})
    assert disc_outer(DiscOuterEvaluator(psi), z) == pytest.approx(1.0 - z, abs=1e-6)


@pytest.mark.parametrize("z", [0.3, 0.5j, 0.9 * np.exp(0.5j), -0.8])
def test_outer_of_a_power_is_the_principal_power(power_disc, z):
    ev = DiscOuterEvaluator(power_disc)
    assert ev.evaluate(z) == pytest.approx((1.0 - z) ** 0.5, abs=1e-6)


@pytest.mark.parametrize("grading", [0, 6])
def test_smooth_modulus_gives_the_exponential(grading):
    ev = DiscOuterEvaluator(lambda theta: np.exp(np.cos(theta)), grading=grading, nodes=1024)
    z = np.array([0.5 + 0.2j, -0.3j, 0.95])
    np.testing.assert_allclose(ev.evaluate(z), np.exp(z), rtol=1e-8)


@pytest.mark.parametrize("beta", [0.25, 0.5, 1.0])
def test_outer_of_a_power_at_random_points(rng, beta):
    z = np.sqrt(rng.uniform(0.0, 0.81, 20)) * np.exp(2j * np.pi * rng.uniform(size=20))
    ev = DiscOuterEvaluator(make_modulus("power", {"beta": beta}))
    np.testing.assert_allclose(ev.evaluate(z), (1.0 - z) ** beta, rtol=0, atol=1e-6)


def test_modulus_near_the_circle_matches_psi(power_disc):
    theta = 2 * np.pi * np.arange(1, 16) / 16
    ev = DiscOuterEvaluator(power_disc, nodes=2 ** 14)
    values = np.abs(ev.evaluate((1.0 - 1e-4) * np.exp(1j * theta)))
    np.testing.assert_allclose(values, power_disc.circle(theta), rtol=0, atol=1e-3)


def test_doubling_the_nodes_does_not_move_smooth_outer_values(rng):
    z = np.sqrt(rng.uniform(0.0, 0.64, 20)) * np.exp(2j * np.pi * rng.uniform(size=20))
    coarse = DiscOuterEvaluator(lambda theta: np.exp(np.cos(theta)), nodes=512, grading=0).evaluate(z)
    fine = DiscOuterEvaluator(lambda theta: np.exp(np.cos(theta)), nodes=1024, grading=0).evaluate(z)
    np.testing.assert_allclose(coarse, fine, rtol=1e-10)


def test_outer_functions_multiply(power_disc):
    cusp = make_modulus("holder_cusp", {"alpha": 0.5})
    product = DiscOuterEvaluator(lambda t: power_disc.circle(t) * cusp.circle(t))
    z = np.array([0.2, 0.6j, -0.7 + 0.1j])
    expected = DiscOuterEvaluator(power_disc).evaluate(z) * DiscOuterEvaluator(cusp).evaluate(z)
    np.testing.assert_allclose(product.evaluate(z), expected, rtol=1e-7)


def test_outer_value_at_zero_is_positive():
    cusp = make_modulus("holder_cusp", {"alpha": 0.5})
    value = DiscOuterEvaluator(cusp).evaluate(0.0)
    assert abs(value.imag) < 1e-12
    assert value.real > 0


def test_disc_evaluator_rejects_bad_input(power_disc):
    with pytest.raises(ConfigError):
        DiscOuterEvaluator(power_disc, nodes=1000)
    with pytest.raises(DomainError):
        DiscOuterEvaluator(power_disc).evaluate(1.0)


# --- lift, dilation, boundary values ---

def test_lift_reads_the_first_coordinate(power_disc):
    g = DiscOuterEvaluator(power_disc)
    f0 = lift_to_ball(g, 3)
    z = np.array([[0.3, 0.4j, 0.1], [-0.2j, 0.0, 0.5]])
    np.testing.assert_allclose(f0(z), g.evaluate(z[:, 0]), rtol=1e-12)
    with pytest.raises(DomainError):
        lift_to_ball(g, 1)


def test_lift_needs_a_lift_profile():
    with pytest.raises(ConfigError):
        ball_outer_from_lift(make_modulus("holder_cusp", {"alpha": 0.5}, n=2))


def test_dilates_approach_the_boundary_values(power_ball, sampler):
    f = ball_outer_from_lift(power_ball)
    xi = sample_sphere(2, 60, sampler).coords
    xi = xi[np.abs(xi[:, 0]) < 0.8]
    exact = (1.0 - xi[:, 0]) ** 0.5
    gaps = [np.max(np.abs(radial_dilate(f, r)(xi) - exact)) for r in (0.9, 0.99, 0.999)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_dilation_radius_must_be_interior(power_ball):
    with pytest.raises(DomainError):
        radial_dilate(ball_outer_from_lift(power_ball), 1.0)


def test_boundary_value_of_a_smooth_function():
    result = boundary_value(lambda z: np.exp(z[:, 0]), np.array([1j]), tol=1e-7)
    assert result.converged
    assert result.radius == pytest.approx(1.0 - 2.0 ** -result.k)
    assert abs(result.value - np.exp(1j)) < 1e-5


def test_boundary_value_reports_non_convergence():
    result = boundary_value(lambda z: np.exp(1j / (1.0 - np.abs(z[:, 0]))), np.array([1.0]), max_k=10)
    assert not result.converged
    assert result.k == 10


# --- ball ---

def test_ball_outer_matches_the_lift(power_ball):
    ev = BallOuterEvaluator(power_ball, mc_count=100_000, sampler=SeededSampler(5))
    z = np.array([0.4, 0.2j])
    value = ball_outer(ev, z)
    exact = 0.5 * np.log(1.0 - 0.4)
    assert abs(value.exponent.real - exact) < 4 * value.se_real + 1e-3
    assert abs(value.exponent.imag) < 4 * value.se_imag + 1e-3
    assert value.modulus == pytest.approx(math.sqrt(0.6), rel=0.05)


def test_ball_outer_at_the_origin_is_the_geometric_mean(power_ball):
    ev = BallOuterEvaluator(power_ball, mc_count=50_000, sampler=SeededSampler(6))
    value = ev.evaluate(np.zeros(2))
    assert abs(value.exponent.real) < 4 * value.se_real + 1e-3
    assert value.exponent.imag == 0.0


def test_ball_outer_near_the_boundary_uses_importance(power_ball):
    ev = BallOuterEvaluator(power_ball, mc_count=100_000, sampler=SeededSampler(7))
    z = np.array([0.95 * np.exp(1.0j), 0.0])
    value = ev.evaluate(z)
    exact = 0.5 * np.log(1.0 - z[0])
    assert abs(value.exponent.real - exact.real) < 4 * value.se_real + 2e-3
    assert abs(value.exponent.imag - exact.imag) < 4 * value.se_imag + 2e-3


def test_lift_profile_close_to_the_boundary(power_ball):
    ev = BallOuterEvaluator(power_ball, mc_count=50_000, sampler=SeededSampler(10))
    z = (1.0 - 2.0 ** -9) * np.array([math.cos(0.5), math.sin(0.5)])
    value = ev.evaluate(z)
    exact = 0.5 * np.log(1.0 - z[0])
    assert abs(value.exponent.real - exact.real) < 4 * value.se_real + 1e-3
    assert abs(value.exponent.imag - exact.imag) < 4 * value.se_imag + 1e-3


@pytest.mark.parametrize("xi", [
    np.array([math.cos(2.0 ** -5.5), math.sin(2.0 ** -5.5)]),
    np.array([np.exp(1j * 2.0 ** -11), 0.0]),
])
def test_non_lift_profile_close_to_the_boundary_keeps_the_error_bounded(xi):
    cusp = make_modulus("holder_cusp", {"alpha": 0.5}, n=2)
    ev = BallOuterEvaluator(cusp, mc_count=20_000, sampler=SeededSampler(11))
    value = ev.evaluate((1.0 - 2.0 ** -5 / 16) * xi)
    assert max(value.se_real, value.se_imag) <= 0.1
    assert value.sample_count <= 20_000 * 16
    assert value.modulus > 0


def test_cap_ladder_ends_at_the_whole_sphere(power_ball):
    ev = BallOuterEvaluator(power_ball)
    radii = ev.cap_radii(1.0 - 2.0 ** -10)
    assert radii[0] == pytest.approx(2.0 ** -10)
    assert radii[-1] == 2.0
    assert np.all(np.diff(radii) > 0)


def test_ball_outer_is_reproducible_per_point(power_ball):
    z = np.array([[0.1, 0.2], [0.3j, -0.1]])
    a = BallOuterEvaluator(power_ball, mc_count=2000, sampler=SeededSampler(8))(z)
    b = BallOuterEvaluator(power_ball, mc_count=2000, sampler=SeededSampler(8))(z[::-1])
    np.testing.assert_array_equal(a, b[::-1])


def test_noisy_ball_outer_raises(power_ball):
    ev = BallOuterEvaluator(power_ball, mc_count=10, sampler=SeededSampler(9), se_cap=1e-6)
    with pytest.raises(PrecisionError):
        ev.evaluate(np.array([0.5, 0.0]))


# --- slice formula ---

@pytest.mark.parametrize("n", [2, 3, 5])
def test_slice_formula_moments(n):
    assert slice_integral(lambda w: np.ones(w.shape), n) == pytest.approx(1.0)
    assert slice_integral(lambda w: np.abs(w) ** 2, n) == pytest.approx(1.0 / n, rel=1e-10)


def test_slice_formula_matches_sphere_sampling(sampler):
    count = 100_000
    first = sample_sphere(3, count, sampler).coords[:, 0]
    integrands = [
        lambda w: np.abs(w) ** 4,
        lambda w: np.cos(3 * np.real(w)),
        lambda w: np.real(w) ** 2 * np.imag(w) ** 2,
        lambda w: np.exp(-np.abs(1 - w)),
        lambda w: np.abs(np.sin(np.angle(w))),
    ]
    for F in integrands:
        values = F(first)
        se = np.std(values, ddof=1) / math.sqrt(count)
        assert abs(slice_integral(F, 3, grid=(64, 512)) - values.mean()) < 3.5 * se + 1e-6


def test_slice_formula_needs_a_ball():
    with pytest.raises(DomainError):
        slice_integral(lambda w: w, 1)
