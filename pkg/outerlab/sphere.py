"""Nonisotropic geometry, measures and seeded sampling on the complex sphere.

Points of S^n (the unit sphere of C^n, real dimension 2n-1) are handled in two
shapes: a single :class:`SpherePoint`, and a :class:`SphereSample` holding a
``(count, n)`` complex array. Every function that takes points accepts either,
or a raw array.

The quasimetric is ``d(u, v) = |1 - <u, v>|`` with ``<u, v> = sum(u_i * conj(v_i))``.
"""

import hashlib
import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, Tuple, Union

import numpy as np
from scipy.special import roots_legendre

from .config import DEFAULTS
from .errors import ConfigError, DimensionMismatchError, DomainError, SamplingError

logger = logging.getLogger(__name__)


# --- SEEDED STREAMS ---

@dataclass(frozen=True)
class SeededSampler:
    """A reproducible random stream identified by ``(seed, stream_id, spawn_key)``.

    ``generator()`` always starts the stream from the beginning, so two calls with
    the same sampler produce the same draws no matter which thread makes them.
    Independent substreams come from :meth:`spawn`.
    """
    seed: int
    stream_id: int = 0
    spawn_key: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.seed < 0 or self.stream_id < 0:
            raise ConfigError("seed and stream_id must be nonnegative")

    def generator(self) -> np.random.Generator:
        sequence = np.random.SeedSequence(
            self.seed, spawn_key=(self.stream_id,) + tuple(self.spawn_key))
        return np.random.Generator(np.random.PCG64(sequence))

    def spawn(self, *keys: int) -> 'SeededSampler':
        """Child stream; distinct key tuples give statistically independent streams."""
        return SeededSampler(self.seed, self.stream_id, tuple(self.spawn_key) + tuple(int(k) for k in keys))

    def for_point(self, z) -> 'SeededSampler':
        """Child stream keyed by the coordinates of ``z`` (one stream per evaluation point)."""
        raw = np.ascontiguousarray(np.asarray(z, dtype=complex)).tobytes()
        key = int.from_bytes(hashlib.blake2b(raw, digest_size=8).digest(), 'little')
        return self.spawn(key)


# --- POINTS AND BALLS ---

@dataclass(frozen=True, eq=False)
class SpherePoint:
    """A point of S^n; coordinates are renormalized on construction."""
    coords: np.ndarray

    def __post_init__(self):
        coords = np.atleast_1d(np.asarray(self.coords, dtype=complex)).ravel()
        if coords.size < 1:
            raise ConfigError("A sphere point needs at least one coordinate")
        norm = np.linalg.norm(coords)
        if norm == 0:
            raise ConfigError("Cannot normalize the zero vector onto the sphere")
        coords = coords / norm
        coords.setflags(write=False)
        object.__setattr__(self, 'coords', coords)

    @classmethod
    def of(cls, *coords: complex) -> 'SpherePoint':
        return cls(np.array(coords, dtype=complex))

    @classmethod
    def one(cls, n: int) -> 'SpherePoint':
        """The point (1, 0, ..., 0)."""
        if n < 1:
            raise ConfigError(f"Dimension must be >= 1, got {n}")
        coords = np.zeros(n, dtype=complex)
        coords[0] = 1.0
        return cls(coords)

    @property
    def n(self) -> int:
        return self.coords.size

    def isclose(self, other: 'SpherePoint', tol: float = 1e-12) -> bool:
        return self.n == other.n and bool(np.all(np.abs(self.coords - other.coords) <= tol))

    def __repr__(self) -> str:
        return f"SpherePoint({np.array2string(self.coords, precision=4)})"


@dataclass(frozen=True)
class NonisotropicBall:
    """``Q = {z in S^n : d(z, center) <= radius}``; radii above 2 are capped at 2."""
    center: SpherePoint
    radius: float

    def __post_init__(self):
        radius = float(self.radius)
        if not radius >= 0:
            raise ConfigError(f"Ball radius must be nonnegative, got {self.radius}")
        object.__setattr__(self, 'radius', min(radius, 2.0))

    @property
    def n(self) -> int:
        return self.center.n

    @property
    def is_whole_sphere(self) -> bool:
        return self.radius >= 2.0

    def contains(self, z) -> Union[bool, np.ndarray]:
        return ball_contains(self, z)

    def with_radius(self, radius: float) -> 'NonisotropicBall':
        return NonisotropicBall(self.center, radius)


@dataclass
class SphereSample:
    """A batch of sphere points; behaves like a list of :class:`SpherePoint`."""
    coords: np.ndarray
    acceptance_rate: float = 1.0
    method: str = "sphere"
    draws: int = 0

    def __len__(self) -> int:
        return self.coords.shape[0]

    def __getitem__(self, index: int) -> SpherePoint:
        return SpherePoint(self.coords[index])

    def __iter__(self) -> Iterator[SpherePoint]:
        for row in self.coords:
            yield SpherePoint(row)

    @property
    def n(self) -> int:
        return self.coords.shape[1]

    def __repr__(self) -> str:
        return (f"SphereSample({len(self)} points, n={self.n}, method={self.method}, "
                f"acceptance={self.acceptance_rate:.3g})")


PointsLike = Union[SpherePoint, SphereSample, np.ndarray]


def as_coords(points: PointsLike) -> np.ndarray:
    """Return points as a ``(count, n)`` complex array (a single point gives count 1)."""
    if isinstance(points, SpherePoint):
        return points.coords[np.newaxis, :]
    if isinstance(points, SphereSample):
        return points.coords
    array = np.asarray(points, dtype=complex)
    if array.ndim == 0:
        return array.reshape(1, 1)
    if array.ndim == 1:
        return array[np.newaxis, :]
    return array


def _is_single(points: PointsLike) -> bool:
    return isinstance(points, SpherePoint) or np.ndim(points) <= 1


# --- QUASIMETRIC ---

def inner(u: PointsLike, v: PointsLike) -> np.ndarray:
    """Hermitian product ``<u, v>`` row by row (broadcasting a single point)."""
    a, b = as_coords(u), as_coords(v)
    if a.shape[-1] != b.shape[-1]:
        raise DimensionMismatchError(f"Dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")
    return np.sum(a * np.conj(b), axis=-1)


def niso_distance(u: PointsLike, v: PointsLike) -> Union[float, np.ndarray]:
    """``d(u, v) = |1 - <u, v>|``, a value in ``[0, 2]``."""
    distance = np.abs(1.0 - inner(u, v))
    if _is_single(u) and _is_single(v):
        return float(distance[0])
    return distance


def ball_contains(ball: NonisotropicBall, z: PointsLike) -> Union[bool, np.ndarray]:
    return niso_distance(z, ball.center) <= ball.radius


# --- ROTATIONS ---

def unitary_to(center: SpherePoint) -> np.ndarray:
    """A unitary matrix ``U`` with ``U @ (1, 0, ..., 0) = center``."""
    c = center.coords
    basis = np.column_stack([c, np.eye(center.n, dtype=complex)])
    q, _ = np.linalg.qr(basis)
    q = q[:, :center.n].copy()
    q[:, 0] *= np.vdot(q[:, 0], c)
    return q


def _rotate(coords: np.ndarray, center: SpherePoint) -> np.ndarray:
    if center.n == 1:
        return coords * center.coords[0]
    if np.allclose(center.coords, SpherePoint.one(center.n).coords, atol=0, rtol=0):
        return coords
    return coords @ unitary_to(center).T


# --- SAMPLING ---

def _gaussian_sphere(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    gauss = rng.standard_normal((count, 2 * n))
    z = gauss[:, :n] + 1j * gauss[:, n:]
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def sample_sphere(n: int, count: int, sampler: SeededSampler) -> SphereSample:
    """``count`` points i.i.d. uniform for the rotation-invariant probability measure."""
    if n < 1:
        raise ConfigError(f"Dimension must be >= 1, got {n}")
    if count <= 0:
        return SphereSample(np.empty((0, n), dtype=complex))
    coords = _gaussian_sphere(sampler.generator(), count, n)
    return SphereSample(coords, acceptance_rate=1.0, method="sphere", draws=count)


def sample_cap(center: SpherePoint, radius: float, count: int, sampler: SeededSampler) -> SphereSample:
    """Direct parametrization of the uniform measure on a nonisotropic ball.

    For n >= 2 the first coordinate is drawn as ``1 - t*exp(i*phi)`` with density
    proportional to ``(1 - |z_1|^2)^(n-2)`` on ``{|1 - z_1| <= radius}`` and the
    remaining coordinates are uniform on the fiber sphere of radius
    ``sqrt(1 - |z_1|^2)``. The cap is then rotated onto ``center``.
    """
    if radius <= 0:
        raise DomainError(f"Cap radius must be positive, got {radius}")
    n = center.n
    rho = min(float(radius), 2.0)
    if count <= 0:
        return SphereSample(np.empty((0, n), dtype=complex), method="cap")
    rng = sampler.generator()

    if n == 1:
        half_angle = 2.0 * math.asin(rho / 2.0)
        theta = rng.uniform(-half_angle, half_angle, size=count)
        coords = np.exp(1j * theta)[:, np.newaxis]
        return SphereSample(_rotate(coords, center), acceptance_rate=1.0, method="cap", draws=count)

    accepted = []
    have = proposed = 0
    while have < count:
        batch = max(2 * (count - have), 1024)
        t = rho * rng.random(batch) ** (1.0 / n)
        phi = rng.uniform(-math.pi / 2, math.pi / 2, size=batch)
        slack = np.cos(phi) - t / 2.0
        keep = slack > 0
        if n > 2:
            keep &= rng.random(batch) < np.clip(slack, 0.0, 1.0) ** (n - 2)
        proposed += batch
        first = 1.0 - t[keep] * np.exp(1j * phi[keep])
        accepted.append(first)
        have += first.size
    first = np.concatenate(accepted)[:count]

    fiber_radius = np.sqrt(np.clip(1.0 - np.abs(first) ** 2, 0.0, None))
    fiber = _gaussian_sphere(rng, count, n - 1) * fiber_radius[:, np.newaxis]
    coords = np.column_stack([first, fiber])
    return SphereSample(_rotate(coords, center), acceptance_rate=have / proposed,
                        method="cap", draws=proposed)


def sample_ball(ball: NonisotropicBall, count: int, sampler: SeededSampler,
                method: str = "rejection", acceptance_floor: float = None,
                max_draws: int = None) -> SphereSample:
    """``count`` points uniform on ``ball``.

    ``method="rejection"`` filters uniform sphere batches and reports the acceptance
    rate; ``"cap"`` uses :func:`sample_cap`; ``"auto"`` picks rejection only when the
    ball is large enough for it to be cheap.
    """
    if ball.radius <= 0:
        raise DomainError("Cannot sample a ball of radius 0")
    if ball.is_whole_sphere:
        return sample_sphere(ball.n, count, sampler)
    if method == "auto":
        method = "rejection" if cap_measure(ball.n, ball.radius) >= DEFAULTS.auto_cap_threshold else "cap"
    if method == "cap":
        return sample_cap(ball.center, ball.radius, count, sampler)
    if method != "rejection":
        raise ConfigError(f"Unknown sampling method '{method}'")

    floor = DEFAULTS.acceptance_floor if acceptance_floor is None else acceptance_floor
    budget = DEFAULTS.max_draws if max_draws is None else max_draws
    if count <= 0:
        return SphereSample(np.empty((0, ball.n), dtype=complex), method="rejection")

    kept = []
    hits = draws = 0
    round_index = 0
    while hits < count:
        batch = sample_sphere(ball.n, DEFAULTS.batch_size, sampler.spawn(round_index)).coords
        round_index += 1
        draws += batch.shape[0]
        inside = batch[niso_distance(batch, ball.center) <= ball.radius]
        kept.append(inside)
        hits += inside.shape[0]
        # (hits + 3) / draws is a conservative upper bound on the acceptance rate
        if (hits + 3) / draws < floor:
            raise SamplingError(
                f"Acceptance rate {hits / draws:.3g} is below the floor {floor:.3g} for radius "
                f"{ball.radius:.3g}; use method='cap' (direct cap parametrization)")
        if draws >= budget and hits < count:
            raise SamplingError(
                f"Draw budget {budget} exhausted after {hits} of {count} points; "
                f"use method='cap' (direct cap parametrization)")
    coords = np.concatenate(kept)[:count]
    rate = hits / draws
    logger.debug("rejection sampling radius=%.3g n=%d acceptance=%.3g", ball.radius, ball.n, rate)
    return SphereSample(coords, acceptance_rate=rate, method="rejection", draws=draws)


# --- MEASURE ---

def cap_measure(n: int, radius: float, nodes: int = 64) -> float:
    """sigma(Q) for a ball of the given radius, by quadrature of the slice formula.

    With ``z_1 = 1 - t*exp(i*phi)`` and ``t = 2*cos(u)`` the integration limits become
    ``|phi| <= u`` and the integrand is smooth, so Gauss-Legendre converges fast.
    """
    if n < 1:
        raise ConfigError(f"Dimension must be >= 1, got {n}")
    rho = min(max(float(radius), 0.0), 2.0)
    if rho == 0.0:
        return 0.0
    if n == 1:
        return 2.0 / math.pi * math.asin(rho / 2.0)

    x, w = roots_legendre(nodes)
    u_lo, u_hi = math.acos(rho / 2.0), math.pi / 2.0
    u = 0.5 * (u_hi - u_lo) * x + 0.5 * (u_hi + u_lo)
    wu = 0.5 * (u_hi - u_lo) * w
    t = 2.0 * np.cos(u)

    # inner integral over |phi| <= u of (2 t cos(phi) - t^2)^(n-2)
    phi = u[:, np.newaxis] * x[np.newaxis, :]
    integrand = np.clip(2.0 * t[:, np.newaxis] * np.cos(phi) - t[:, np.newaxis] ** 2, 0.0, None) ** (n - 2)
    inner_integral = u * np.sum(integrand * w[np.newaxis, :], axis=1)

    jacobian = t * 2.0 * np.sin(u)
    return float((n - 1) / math.pi * np.sum(wu * jacobian * inner_integral))


@dataclass
class MeasureEstimate:
    """Monte-Carlo estimate of sigma(Q) with its standard error."""
    value: float
    standard_error: float
    count: int
    method: str
    stage_fractions: Tuple[float, ...] = field(default_factory=tuple)


def ball_measure(ball: NonisotropicBall, count: int, sampler: SeededSampler,
                 method: str = "nested") -> MeasureEstimate:
    """Estimate sigma(Q).

    ``"direct"`` is the hit fraction of uniform sphere samples. ``"nested"`` halves
    the radius from 2 down to ``ball.radius`` and multiplies the conditional hit
    fractions, each stage sampled uniformly on the previous ball; it stays accurate
    when sigma(Q) is far below ``1/count``.
    """
    if count < 1000:
        raise ConfigError(f"ball_measure needs count >= 1000, got {count}")
    if ball.radius == 0:
        return MeasureEstimate(0.0, 0.0, count, method)
    if ball.is_whole_sphere:
        return MeasureEstimate(1.0, 0.0, count, method)

    if method == "direct":
        points = sample_sphere(ball.n, count, sampler)
        p = float(np.mean(niso_distance(points.coords, ball.center) <= ball.radius))
        return MeasureEstimate(p, math.sqrt(p * (1.0 - p) / count), count, method, (p,))
    if method != "nested":
        raise ConfigError(f"Unknown measure method '{method}'")

    chain = [2.0]
    while chain[-1] / 2.0 > ball.radius:
        chain.append(chain[-1] / 2.0)
    chain.append(ball.radius)
    per_stage = max(count // (len(chain) - 1), 1)

    value, rel_var = 1.0, 0.0
    fractions = []
    for stage, (outer_r, inner_r) in enumerate(zip(chain[:-1], chain[1:])):
        points = sample_cap(ball.center, outer_r, per_stage, sampler.spawn(stage))
        p = float(np.mean(niso_distance(points.coords, ball.center) <= inner_r))
        fractions.append(p)
        if p == 0.0:
            logger.warning("nested measure: no hits at stage %d (radius %.3g)", stage, inner_r)
            return MeasureEstimate(0.0, value / per_stage, count, method, tuple(fractions))
        value *= p
        rel_var += (1.0 - p) / (p * per_stage)
    return MeasureEstimate(value, value * math.sqrt(rel_var), count, method, tuple(fractions))


__all__ = [
    "SeededSampler", "SpherePoint", "NonisotropicBall", "SphereSample", "MeasureEstimate",
    "as_coords", "inner", "niso_distance", "ball_contains", "unitary_to",
    "sample_sphere", "sample_cap", "sample_ball", "cap_measure", "ball_measure",
]
