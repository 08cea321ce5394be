"""Cauchy, Herglotz and Poisson kernels, and numerical checks of their estimates.

All kernels take interior points ``z`` (one point, or a ``(count, n)`` array) and
boundary points ``xi`` and broadcast a single point against a batch.
"""

import logging
import math
from typing import Sequence, Union

import numpy as np
from scipy import integrate

from .config import DEFAULTS
from .errors import ConfigError, DimensionMismatchError, DomainError, FitError
from .oscillation import ExponentFit, fit_loglog
from .sphere import (NonisotropicBall, SeededSampler, SpherePoint, as_coords, inner,
                     niso_distance, sample_ball, sample_cap)

logger = logging.getLogger(__name__)

ArrayOrScalar = Union[complex, np.ndarray]


def _check_interior(z, delta_min: float) -> np.ndarray:
    coords = as_coords(z)
    if np.any(np.linalg.norm(coords, axis=1) > 1.0 - delta_min):
        raise DomainError(
            f"Kernel evaluated at |z| > 1 - {delta_min:g}; it is singular on the boundary diagonal")
    return coords


def _is_one(point) -> bool:
    return isinstance(point, SpherePoint) or np.ndim(point) <= 1


def _squeeze(values: np.ndarray, z, xi):
    return values[0] if _is_one(z) and _is_one(xi) else values


def cauchy_kernel(z, xi, n: int = None, delta_min: float = None) -> ArrayOrScalar:
    """``C(z, xi) = (1 - <z, xi>)^(-n)`` on the principal branch."""
    delta_min = DEFAULTS.delta_min if delta_min is None else delta_min
    coords = _check_interior(z, delta_min)
    dim = coords.shape[1]
    if n is not None and n != dim:
        raise DimensionMismatchError(f"n={n} but z has {dim} coordinates")
    values = np.exp(-dim * np.log(1.0 - inner(coords, xi)))
    return _squeeze(values, z, xi)


def herglotz_kernel(z, xi, n: int = None, delta_min: float = None) -> ArrayOrScalar:
    """``2 C(z, xi) - 1``; on the disc its real part is the Poisson kernel."""
    return 2.0 * cauchy_kernel(z, xi, n, delta_min) - 1.0


def im_cauchy(z, xi, n: int = None, delta_min: float = None) -> Union[float, np.ndarray]:
    return np.imag(herglotz_kernel(z, xi, n, delta_min))


def poisson_disc(r: float, theta) -> Union[float, np.ndarray]:
    """``P_r(theta) = (1 - r^2) / (1 + r^2 - 2 r cos theta)``, normalized so its mean over T is 1."""
    if not 0 <= r < 1:
        raise DomainError(f"Poisson kernel needs 0 <= r < 1, got {r}")
    value = (1.0 - r * r) / (1.0 + r * r - 2.0 * r * np.cos(theta))
    return float(value) if np.ndim(value) == 0 else value


def poisson_lq_norm(q: float, r: float) -> float:
    """``int_0^{2 pi} P_r(theta)^q d theta`` by adaptive quadrature."""
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    if not 0 <= r < 1:
        raise DomainError(f"Poisson kernel needs 0 <= r < 1, got {r}")
    width = 1.0 - r
    breaks = sorted({min(math.pi, k * width) for k in (1.0, 10.0, 100.0)} - {math.pi})
    value, _ = integrate.quad(lambda t: poisson_disc(r, t) ** q, 0.0, math.pi,
                              points=breaks or None, limit=400)
    return 2.0 * value


def poisson_lq_scaling(q: float, radii: Sequence[float]) -> ExponentFit:
    """Fit the growth exponent of ``||P_r||_q^q`` in ``1/(1 - r)``; compare with ``q - 1``."""
    radii = [float(r) for r in radii]
    if len(radii) < 3:
        raise FitError(f"poisson_lq_scaling needs at least 3 radii, got {len(radii)}")
    norms = [poisson_lq_norm(q, r) for r in radii]
    scales = [1.0 / (1.0 - r) for r in radii]
    return fit_loglog(scales, norms, min_points=3)


# --- DIFFERENCE ESTIMATE FOR THE IMAGINARY PART ---

NORMALIZATIONS = ("lemma", "refined")


def _annulus_scale(radius: float, j: int, n: int, normalization: str) -> float:
    shell = 2.0 ** j * radius
    if normalization == "lemma":
        return radius / shell ** (n + 1)
    if normalization == "refined":
        return math.sqrt(radius) / shell ** (n + 0.5)
    raise ConfigError(f"Unknown normalization '{normalization}', expected one of {NORMALIZATIONS}")


def kernel_diff_ratio(z, xi, radius: float, j: int, normalization: str = "lemma",
                      shrink: float = None) -> np.ndarray:
    """``|Im C~(z', xi) - Im C~(1', xi)|`` divided by the annulus scale.

    ``z'`` and ``1'`` are ``z`` and ``(1, 0, ..., 0)`` pulled inside by ``1 - shrink``
    (default ``radius * 1e-3``).
    """
    coords = as_coords(z)
    n = coords.shape[1]
    shrink = radius * 1e-3 if shrink is None else shrink
    factor = 1.0 - shrink
    anchor = factor * SpherePoint.one(n).coords
    diff = np.abs(im_cauchy(factor * coords, xi, delta_min=0.0) - im_cauchy(anchor, xi, delta_min=0.0))
    return np.atleast_1d(diff) / _annulus_scale(radius, j, n, normalization)


def kernel_diff_bound_check(ball: NonisotropicBall, j: int, count: int, sampler: SeededSampler,
                            normalization: str = "lemma") -> float:
    """Largest normalized kernel difference over ``count`` pairs ``z in Q``, ``xi in Omega_j``.

    ``Omega_j`` is the shell ``2^j l < d(xi, 1) < 2^(j+1) l`` around the center of ``Q``,
    which must be ``(1, 0, ..., 0)``.
    """
    n = ball.n
    if not ball.center.isclose(SpherePoint.one(n)):
        raise ConfigError("kernel_diff_bound_check expects a ball centered at (1, 0, ..., 0)")
    if j < 0:
        raise ConfigError(f"Annulus index must be >= 0, got {j}")
    inner_r, outer_r = 2.0 ** j * ball.radius, 2.0 ** (j + 1) * ball.radius
    if outer_r > 2.0:
        raise DomainError(f"Annulus {j} is empty for l(Q)={ball.radius:g} (outer radius {outer_r:g} > 2)")
    _annulus_scale(ball.radius, j, n, normalization)  # rejects unknown normalizations early

    z = sample_ball(ball, count, sampler.spawn(0), method="auto").coords
    kept, have, round_index = [], 0, 0
    while have < count:
        cap = sample_cap(ball.center, outer_r, 2 * (count - have) + 16, sampler.spawn(1, round_index))
        round_index += 1
        shell = cap.coords[niso_distance(cap.coords, ball.center) > inner_r]
        kept.append(shell)
        have += shell.shape[0]
    xi = np.concatenate(kept)[:count]

    ratio = kernel_diff_ratio(z, xi, ball.radius, j, normalization)
    constant = float(np.max(ratio))
    logger.debug("kernel check n=%d l=%.3g j=%d %s constant=%.4g", n, ball.radius, j,
                 normalization, constant)
    return constant


__all__ = [
    "cauchy_kernel", "herglotz_kernel", "im_cauchy", "poisson_disc", "poisson_lq_norm",
    "poisson_lq_scaling", "kernel_diff_ratio", "kernel_diff_bound_check", "NORMALIZATIONS",
]
