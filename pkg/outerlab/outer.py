"""Outer functions on the disc and on the ball.

Interior-evaluable functions in this module are callables on ``(count, n)`` arrays
carrying ``interior = True``; :func:`outerlab.oscillation.oscillation_profile` reads
them through a radial dilate.

Usage
-----
>>> psi = make_modulus("power", {"beta": 0.5})
>>> disc = DiscOuterEvaluator(psi)
>>> disc_outer(disc, 0.3)                      # (1 - 0.3) ** 0.5
>>> f0 = lift_to_ball(disc, n=2)
>>> ev = BallOuterEvaluator(make_modulus("power", {"beta": 0.5}, n=2), sampler=SeededSampler(3))
>>> ball_outer(ev, np.array([0.4, 0.2j])).value
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Tuple, Union

import numpy as np
from scipy.special import roots_jacobi

from .boundary import ModulusProfile
from .config import DEFAULTS
from .errors import ConfigError, DomainError, PrecisionError
from .sphere import (SeededSampler, SpherePoint, as_coords, cap_measure, niso_distance,
                     sample_cap, sample_sphere)

logger = logging.getLogger(__name__)


# --- DISC ---

def _graded_nodes(m: int, grading: int) -> Tuple[np.ndarray, np.ndarray]:
    """Angles in (0, 2 pi) and weights summing to 1 for ``(1/2 pi) int_0^{2 pi} g``.

    ``grading > 0`` is a sigmoidal substitution of that order which clusters nodes
    at 0 (and 2 pi); the node at 0 has zero weight and is dropped.
    """
    h = 2.0 * math.pi / m
    if grading == 0:
        return h * np.arange(m), np.full(m, 1.0 / m)
    p = float(grading)
    s = h * np.arange(1, m)
    x = (math.pi - s) / math.pi
    v = (1.0 / p - 0.5) * x ** 3 - x / p + 0.5
    dv = (-3.0 / math.pi) * (1.0 / p - 0.5) * x ** 2 + 1.0 / (p * math.pi)
    vp, up = v ** p, (1.0 - v) ** p
    theta = 2.0 * math.pi * vp / (vp + up)
    dtheta = 2.0 * math.pi * p * (v * (1.0 - v)) ** (p - 1.0) * dv / (vp + up) ** 2
    return theta, h * dtheta / (2.0 * math.pi)


class DiscOuterEvaluator:
    """Quadrature for ``O_psi(z) = exp((1/2 pi) int (e^{it} + z)/(e^{it} - z) log psi(e^{it}) dt)``.

    ``psi`` is a :class:`ModulusProfile` (its circle profile is used) or a function of
    the angle. Nodes are graded toward ``singular_angle``. For ``|z| >= subtraction_radius``
    the value ``log psi(arg z)`` is subtracted under the integral and added back exactly.
    """

    interior = True

    def __init__(self, psi: Union[ModulusProfile, Callable[[np.ndarray], np.ndarray]],
                 nodes: int = None, grading: int = None, floor: float = None,
                 singular_angle: float = None, delta_min: float = None,
                 subtraction_radius: float = None):
        self.nodes = DEFAULTS.disc_nodes if nodes is None else int(nodes)
        if self.nodes < 2 ** 8 or self.nodes & (self.nodes - 1):
            raise ConfigError(f"nodes must be a power of two >= 256, got {self.nodes}")
        self.grading = DEFAULTS.disc_grading if grading is None else int(grading)
        if self.grading < 0:
            raise ConfigError(f"grading must be >= 0, got {self.grading}")
        self.delta_min = DEFAULTS.delta_min if delta_min is None else delta_min
        self.subtraction_radius = (DEFAULTS.subtraction_radius if subtraction_radius is None
                                   else subtraction_radius)

        if isinstance(psi, ModulusProfile):
            self.floor = psi.floor if floor is None else floor
            self.singular_angle = psi.singular_angle if singular_angle is None else singular_angle
            self._circle = psi.circle
            self.descriptor = dict(psi.descriptor)
        else:
            self.floor = DEFAULTS.floor if floor is None else floor
            self.singular_angle = 0.0 if singular_angle is None else singular_angle
            low = self.floor
            self._circle = lambda theta: np.maximum(np.asarray(psi(theta), dtype=float), low)
            self.descriptor = {"family": getattr(psi, '__name__', 'custom')}

        theta, weights = _graded_nodes(self.nodes, self.grading)
        self.node_angles = theta + self.singular_angle
        self.weights = weights
        self._unit = np.exp(1j * self.node_angles)
        self.log_values = np.log(self._circle(self.node_angles))
        if not np.all(np.isfinite(self.log_values)):
            raise ConfigError("log psi is not finite at every quadrature node")

    def log_psi(self, theta) -> np.ndarray:
        return np.log(self._circle(np.asarray(theta, dtype=float)))

    def log_outer(self, z) -> Union[complex, np.ndarray]:
        """The exponent ``(1/2 pi) int H(z, t) log psi(e^{it}) dt``."""
        scalar = np.ndim(z) == 0
        z = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
        if np.any(np.abs(z) > 1.0 - self.delta_min):
            raise DomainError(
                f"|z| exceeds 1 - {self.delta_min:g}; use boundary_value() for radial limits")
        result = np.empty(z.shape, dtype=complex)
        chunk = max(1, 2 ** 22 // self.nodes)
        for start in range(0, z.size, chunk):
            part = z[start:start + chunk]
            reference = np.zeros(part.shape)
            near = np.abs(part) >= self.subtraction_radius
            if np.any(near):
                angle = np.angle(part[near])
                ref = self.log_psi(angle)
                usable = ref > math.log(10.0 * self.floor)
                reference[np.flatnonzero(near)[usable]] = ref[usable]
            kernel = (self._unit[np.newaxis, :] + part[:, np.newaxis]) / (
                self._unit[np.newaxis, :] - part[:, np.newaxis])
            centred = self.log_values[np.newaxis, :] - reference[:, np.newaxis]
            result[start:start + chunk] = reference + (kernel * centred) @ self.weights
        return result[0] if scalar else result

    def evaluate(self, z) -> Union[complex, np.ndarray]:
        return np.exp(self.log_outer(z))

    def __call__(self, coords: np.ndarray) -> np.ndarray:
        return self.evaluate(as_coords(coords)[:, 0])

    def __repr__(self) -> str:
        return f"DiscOuterEvaluator({self.descriptor}, nodes={self.nodes}, grading={self.grading})"


def disc_outer(ev: DiscOuterEvaluator, z) -> Union[complex, np.ndarray]:
    return ev.evaluate(z)


# --- LIFT AND DILATION ---

class LiftedFunction:
    """``f0(z_1, ..., z_n) = g(z_1)`` for a disc function g."""

    interior = True

    def __init__(self, g: DiscOuterEvaluator, n: int):
        if n < 2:
            raise DomainError(f"lift_to_ball needs n >= 2, got {n}")
        self.g = g
        self.n = n

    def __call__(self, coords: np.ndarray) -> np.ndarray:
        coords = as_coords(coords)
        if coords.shape[1] != self.n:
            raise ConfigError(f"Lift lives on B^{self.n}, got n={coords.shape[1]}")
        return np.atleast_1d(self.g.evaluate(coords[:, 0]))

    def evaluate(self, z) -> complex:
        return complex(self(as_coords(z))[0])


def lift_to_ball(g: DiscOuterEvaluator, n: int) -> LiftedFunction:
    return LiftedFunction(g, n)


def ball_outer_from_lift(profile: ModulusProfile, **disc_options) -> LiftedFunction:
    """Outer function of a lift profile ``|g(zeta_1)|``: the lift of the disc outer function of psi."""
    if not profile.is_lift:
        raise ConfigError(f"Profile '{profile.name}' is not a lift; use BallOuterEvaluator")
    if profile.dimension < 2:
        raise DomainError("ball_outer_from_lift needs n >= 2; use DiscOuterEvaluator on the disc")
    return LiftedFunction(DiscOuterEvaluator(profile, **disc_options), profile.dimension)


class RadialDilate:
    """``xi -> f(r xi)``."""

    interior = False

    def __init__(self, f: Callable[[np.ndarray], np.ndarray], r: float):
        if not 0 < r < 1:
            raise DomainError(f"Dilation radius must lie in (0, 1), got {r}")
        self.f = f
        self.r = r

    def __call__(self, coords: np.ndarray) -> np.ndarray:
        return np.asarray(self.f(self.r * as_coords(coords)))


def radial_dilate(f: Callable[[np.ndarray], np.ndarray], r: float) -> RadialDilate:
    return RadialDilate(f, r)


@dataclass
class BoundaryValue:
    """Radial limit ``lim f(r xi)`` read off the schedule ``r_k = 1 - 2^-k``."""
    value: complex
    radius: float
    k: int
    converged: bool


def boundary_value(f: Callable[[np.ndarray], np.ndarray], xi, tol: float = None,
                   max_k: int = None) -> BoundaryValue:
    tol = DEFAULTS.boundary_tol if tol is None else tol
    max_k = DEFAULTS.boundary_max_k if max_k is None else max_k
    max_k = min(max_k, int(math.floor(-math.log2(DEFAULTS.delta_min))))
    point = as_coords(xi)
    previous = None
    for k in range(1, max_k + 1):
        r = 1.0 - 2.0 ** -k
        value = complex(np.asarray(f(r * point)).ravel()[0])
        if previous is not None and abs(value - previous) < tol * max(1.0, abs(value)):
            return BoundaryValue(value, r, k, True)
        previous = value
    logger.warning("boundary_value did not settle within tol=%.1e by r=%.10f", tol, r)
    return BoundaryValue(previous, r, max_k, False)


# --- BALL ---

@dataclass
class BallOuterValue:
    """One Monte-Carlo evaluation of the ball outer function."""
    value: complex
    exponent: complex
    se_real: float
    se_imag: float
    sample_count: int

    @property
    def modulus(self) -> float:
        return abs(self.value)

    @property
    def phase(self) -> float:
        return float(self.exponent.imag)


class BallOuterEvaluator:
    """Monte-Carlo evaluation of ``exp(int (2 C(z, xi) - 1) log phi(xi) d sigma(xi))``.

    ``log phi(z/|z|)`` is used as a control variate. For ``|z| > importance_radius``
    (when ``importance`` is not False) the samples are split evenly over nested caps
    around ``z/|z|`` with radii ``(1 - |z|) * 2^k`` up to the whole sphere, and the
    mixture density is divided out. The cap ladder keeps the kernel-to-density ratio
    bounded, so the variance grows like ``log(1/(1 - |z|))`` instead of ``1/(1 - |z|)``.

    When the standard error exceeds ``se_cap`` the sample count is doubled on a fresh
    substream, up to ``max_growth`` times ``mc_count``; past that PrecisionError.
    """

    interior = True

    def __init__(self, phi: ModulusProfile, mc_count: int = None, sampler: SeededSampler = None,
                 delta_min: float = None, se_cap: float = None, control_variate: bool = True,
                 importance: bool = None, max_growth: int = None):
        self.phi = phi
        self.n = phi.dimension
        self.mc_count = DEFAULTS.ball_mc_count if mc_count is None else int(mc_count)
        self.sampler = SeededSampler(0) if sampler is None else sampler
        self.delta_min = DEFAULTS.delta_min if delta_min is None else delta_min
        self.se_cap = DEFAULTS.ball_se_cap if se_cap is None else se_cap
        self.control_variate = control_variate
        self.importance = importance
        self.max_growth = DEFAULTS.ball_mc_growth if max_growth is None else int(max_growth)
        if self.mc_count < 2 or self.max_growth < 1:
            raise ConfigError("mc_count must be >= 2 and max_growth >= 1")

    def _use_importance(self, radius: float) -> bool:
        if self.importance is None:
            return radius > DEFAULTS.importance_radius
        return bool(self.importance)

    def cap_radii(self, radius: float) -> np.ndarray:
        """Radii of the nested caps used near the boundary; the last one is the sphere."""
        gap = max(1.0 - radius, self.delta_min)
        levels = int(math.ceil(math.log2(2.0 / gap))) + 1
        return np.minimum(2.0, gap * 2.0 ** np.arange(levels))

    def evaluate(self, z) -> BallOuterValue:
        z = as_coords(z)[0]
        if z.size != self.n:
            raise ConfigError(f"Evaluator lives on B^{self.n}, got n={z.size}")
        radius = float(np.linalg.norm(z))
        if radius > 1.0 - self.delta_min:
            raise DomainError(
                f"|z| exceeds 1 - {self.delta_min:g}; use boundary_value() for radial limits")
        stream = self.sampler.for_point(z)

        count = self.mc_count
        attempt = 0
        while True:
            exponent, se_real, se_imag = self._estimate(z, radius, count, stream.spawn(attempt))
            if max(se_real, se_imag) <= self.se_cap or count * 2 > self.mc_count * self.max_growth:
                break
            logger.debug("ball outer SE %.3g above %.3g at |z|=%.6f; doubling to %d samples",
                         max(se_real, se_imag), self.se_cap, radius, 2 * count)
            count *= 2
            attempt += 1
        return self._finish(exponent, se_real, se_imag, count)

    def _estimate(self, z: np.ndarray, radius: float, count: int,
                  stream: SeededSampler) -> Tuple[complex, float, float]:
        from .kernels import herglotz_kernel

        if radius == 0.0:
            logs = self.phi.log(sample_sphere(self.n, count, stream).coords)
            return complex(np.mean(logs)), float(np.std(logs, ddof=1) / math.sqrt(count)), 0.0

        direction = SpherePoint(z / radius)
        reference = float(self.phi.log(direction)[0]) if self.control_variate else 0.0

        if self._use_importance(radius):
            radii = self.cap_radii(radius)
            count = max(count, radii.size)
            shares = [part.size for part in np.array_split(np.arange(count), radii.size)]
            xi = np.vstack([sample_cap(direction, r, m, stream.spawn(k)).coords
                            for k, (r, m) in enumerate(zip(radii, shares))])
            distance = niso_distance(xi, direction)
            masses = np.array([cap_measure(self.n, r) for r in radii])
            weights = np.asarray(shares, dtype=float) / count
            inside = distance[:, np.newaxis] <= radii[np.newaxis, :] * (1.0 + 1e-12)
            density = (inside * (weights / masses)).sum(axis=1)
        else:
            xi = sample_sphere(self.n, count, stream).coords
            density = np.ones(count)

        terms = herglotz_kernel(z, xi, delta_min=self.delta_min) * (self.phi.log(xi) - reference) / density
        exponent = reference + complex(np.mean(terms))
        se_real = float(np.std(terms.real, ddof=1) / math.sqrt(count))
        se_imag = float(np.std(terms.imag, ddof=1) / math.sqrt(count))
        return exponent, se_real, se_imag

    def _finish(self, exponent: complex, se_real: float, se_imag: float, count: int) -> BallOuterValue:
        if max(se_real, se_imag) > self.se_cap:
            raise PrecisionError(
                f"Exponent standard error {max(se_real, se_imag):.3g} exceeds {self.se_cap:g} "
                f"after {count} samples; raise mc_count or max_growth")
        return BallOuterValue(complex(np.exp(exponent)), exponent, se_real, se_imag, count)

    def __call__(self, coords: np.ndarray) -> np.ndarray:
        return np.array([self.evaluate(row).value for row in as_coords(coords)])


def ball_outer(ev: BallOuterEvaluator, z) -> BallOuterValue:
    return ev.evaluate(z)


# --- SLICE FORMULA ---

def slice_integral(F: Callable[[np.ndarray], np.ndarray], n: int,
                   grid: Tuple[int, int] = (64, 256)) -> float:
    """``int_{S^n} F(zeta_1) d sigma`` as a weighted integral over the disc.

    With ``s = r^2`` the weight ``r (1 - r^2)^(n-2) dr`` becomes ``(1 - s)^(n-2) ds / 2``;
    the radial rule is Gauss-Jacobi in s and the angular rule uses midpoints. The
    normalizing constant is fixed by requiring ``F = 1`` to integrate to 1.
    """
    if n < 2:
        raise DomainError("The slice formula needs n >= 2")
    radial, angular = grid
    x, w = roots_jacobi(radial, n - 2, 0)
    s = 0.5 * (x + 1.0)
    beta = 2.0 * math.pi * (np.arange(angular) + 0.5) / angular
    lam = np.sqrt(s)[:, np.newaxis] * np.exp(1j * beta)[np.newaxis, :]
    values = np.asarray(F(lam.ravel()), dtype=float).reshape(lam.shape)
    return float(np.sum(w * values.mean(axis=1)) / np.sum(w))


__all__ = [
    "DiscOuterEvaluator", "disc_outer", "LiftedFunction", "lift_to_ball", "ball_outer_from_lift",
    "RadialDilate", "radial_dilate", "BoundaryValue", "boundary_value", "BallOuterValue",
    "BallOuterEvaluator", "ball_outer", "slice_integral",
]
