import math

import numpy as np
import pytest
from scipy.integrate import quad

from outerlab.boundary import (ModulusProfile, holder_constant_at, list_families, log_lp_norm,
                               log_lp_norm_1d, make_modulus, norm_report, slice_constant)
from outerlab.errors import ConfigError, DomainError
from outerlab.outer import slice_integral
from outerlab.sphere import SpherePoint, sample_sphere


def test_registered_families():
    assert {"constant", "holder_cusp", "power", "log_spike", "lifted_1d"} <= set(list_families())


@pytest.mark.parametrize("name,params,n", [
    ("nope", {}, 1),
    ("log_spike", {"gamma": 0.2}, 2),
    ("power", {"gamma": 0.2}, 1),
    ("power", {"beta": -1.0}, 1),
    ("holder_cusp", {"alpha": 1.5}, 1),
    ("constant", {"c": 0.0}, 1),
])
def test_bad_families_raise_config_errors(name, params, n):
    with pytest.raises(ConfigError):
        make_modulus(name, params, n=n)


def test_power_profile_values():
    phi = make_modulus("power", {"beta": 0.5}, n=2)
    values = phi(np.array([[-1.0, 0.0], [0.0, 1.0]]))
    np.testing.assert_allclose(values, [math.sqrt(2.0), 1.0])
    assert phi.is_lift
    assert phi.circle(np.array([math.pi]))[0] == pytest.approx(math.sqrt(2.0))


def test_profile_rejects_wrong_dimension():
    phi = make_modulus("power", {"beta": 0.5}, n=2)
    with pytest.raises(ConfigError):
        phi(np.ones((3, 3)))


def test_clamping_is_counted():
    phi = make_modulus("constant", {"c": 1e-20}, n=2, floor=1e-12)
    values = phi(np.eye(2))
    np.testing.assert_array_equal(values, [1e-12, 1e-12])
    assert phi.clamp_events == 2
    assert phi.clamp_fraction == 1.0
    phi.reset_counters()
    assert phi.clamp_events == 0


def test_holder_cusp_is_a_lift_only_on_the_disc():
    assert make_modulus("holder_cusp", {"alpha": 0.5}, n=1).is_lift
    assert not make_modulus("holder_cusp", {"alpha": 0.5}, n=2).is_lift


def test_log_spike_is_floored_at_zero_angle():
    psi = make_modulus("log_spike", {"gamma": 0.25}, n=1, floor=1e-12)
    assert psi.circle(np.array([0.0]))[0] == pytest.approx(1e-12)
    assert psi.circle(np.array([math.pi]))[0] == pytest.approx(1.0)


def test_lifted_power_is_the_power_profile(sampler):
    lifted = make_modulus("lifted_1d", {"base": "power", "beta": 0.5}, n=2)
    power = make_modulus("power", {"beta": 0.5}, n=2)
    points = sample_sphere(2, 200, sampler).coords
    interior = np.abs(points[:, 0]) < 0.9
    np.testing.assert_allclose(lifted(points[interior]), power(points[interior]), rtol=1e-6)


# --- Hoelder constant ---

def test_holder_certificate_for_the_right_exponent(sampler):
    phi = make_modulus("holder_cusp", {"alpha": 0.5}, n=1)
    cert = holder_constant_at(phi, SpherePoint.one(1), 0.5, 17_000, sampler)
    assert 0.99 <= cert.c0 <= 1.0 + 1e-9
    assert not cert.diverging
    assert len(cert.shell_maxima) == 17


def test_holder_ratio_diverges_above_the_exponent(sampler):
    phi = make_modulus("holder_cusp", {"alpha": 0.5}, n=1)
    cert = holder_constant_at(phi, SpherePoint.one(1), 0.75, 17_000, sampler)
    assert cert.diverging
    assert cert.shell_maxima[-1] > cert.shell_maxima[-5]


def test_holder_certificate_needs_alpha_in_unit_interval(sampler):
    phi = make_modulus("holder_cusp", {"alpha": 0.5}, n=1)
    with pytest.raises(ConfigError):
        holder_constant_at(phi, SpherePoint.one(1), 1.0, 100, sampler)


# --- norms ---

def test_log_norm_of_a_constant(sampler):
    phi = make_modulus("constant", {"c": math.e}, n=3)
    estimate = log_lp_norm(phi, 2.0, 1000, sampler)
    assert estimate.value == pytest.approx(1.0)
    assert estimate.standard_error == pytest.approx(0.0, abs=1e-12)
    assert not estimate.clamp_dominated


def test_log_norm_on_the_circle_matches_its_fourier_series(sampler):
    # log|1 - e^{i theta}| = -sum cos(k theta)/k, so its mean square is pi^2/12
    psi = make_modulus("power", {"beta": 1.0}, n=1)
    exact = math.pi ** 2 / 12
    assert log_lp_norm_1d(psi, 2.0) == pytest.approx(exact, rel=1e-6)
    estimate = log_lp_norm(psi, 2.0, 200_000, sampler)
    assert abs(estimate.value - exact) < 4 * estimate.standard_error


def test_log_norm_needs_p_at_least_one(sampler):
    phi = make_modulus("power", {"beta": 1.0}, n=2)
    with pytest.raises(DomainError):
        log_lp_norm(phi, 0.5, 100, sampler)
    with pytest.raises(DomainError):
        log_lp_norm_1d(phi, 0.5)


def test_log_spike_norm_is_finite_for_integrable_powers():
    # |log psi|^p ~ |theta|^(-gamma p) is integrable for gamma p < 1
    psi = make_modulus("log_spike", {"gamma": 0.2}, n=1)
    coarse = log_lp_norm_1d(psi, 4.0, limit=100)
    fine = log_lp_norm_1d(psi, 4.0, limit=400)
    assert math.isfinite(coarse)
    assert fine == pytest.approx(coarse, rel=1e-4)


def test_lifted_norm_matches_the_slice_formula(sampler):
    phi = make_modulus("power", {"beta": 1.0}, n=2)
    estimate = log_lp_norm(phi, 2.0, 100_000, sampler)
    quadrature = slice_integral(lambda w: np.abs(np.log(np.abs(1.0 - w))) ** 2, 2, grid=(128, 512))
    assert abs(estimate.value - quadrature) < 4 * estimate.standard_error


def test_clamp_dominated_norm_is_flagged(sampler):
    phi = make_modulus("constant", {"c": 1e-20}, n=2)
    assert log_lp_norm(phi, 1.0, 100, sampler).clamp_dominated


# --- slice constant ---

def test_slice_constant_of_a_constant():
    phi = make_modulus("constant", {"c": math.e}, n=2)
    slices = slice_constant(phi, directions=2, angles=256)
    assert slices.value == pytest.approx(2 * math.pi)
    assert slices.error_estimate == pytest.approx(0.0, abs=1e-12)
    assert not slices.refined


def test_slice_through_one_is_the_circle_integral():
    phi = make_modulus("power", {"beta": 1.0}, n=2)
    slices = slice_constant(phi, directions=2, angles=4096)
    expected = 2 * math.pi * log_lp_norm_1d(make_modulus("power", {"beta": 1.0}, n=1), 1.0)
    assert slices.value == pytest.approx(expected, rel=2e-2)
    assert slices.worst_direction.isclose(SpherePoint.one(2))
    assert slices.refined


@pytest.mark.parametrize("angles", [1024, 4096])
def test_slice_error_estimate_tracks_the_quadrature_error(angles):
    phi = make_modulus("power", {"beta": 0.5}, n=2)
    slices = slice_constant(phi, directions=2, angles=angles)
    exact, _ = quad(lambda t: abs(0.5 * math.log(abs(2.0 * math.sin(t / 2.0)))), 0.0, 2 * math.pi,
                    points=[math.pi / 3, 5 * math.pi / 3], limit=200)
    true_error = abs(slices.value - exact)
    assert slices.refined
    assert slices.error_estimate < 0.01
    assert true_error / 5 <= slices.error_estimate <= 5 * true_error + 1e-9


def test_slice_constant_needs_dimension_for_plain_functions():
    with pytest.raises(ConfigError):
        slice_constant(lambda z: np.ones(z.shape[0]), directions=2, angles=64)


def test_norm_report_collects_both_constants(sampler):
    phi = make_modulus("power", {"beta": 1.0}, n=2)
    report = norm_report(phi, 2.0, 5000, sampler, directions=4, angles=512)
    assert report.q == pytest.approx(2.0)
    assert report.b_p > 0
    assert report.b_0 > 0


def test_profile_from_a_custom_evaluator():
    phi = ModulusProfile(lambda z: np.abs(z[:, 1]) + 1.0, 2, 1e-12, {"family": "custom"})
    assert phi.name == "custom"
    np.testing.assert_allclose(phi(np.array([[0.0, 1.0]])), [2.0])
    with pytest.raises(ConfigError):
        phi.circle(0.0)
