"""Mean oscillation, exponent fitting and the exponent algebra of the smoothness theorems.

Usage
-----
>>> from outerlab.oscillation import mean_oscillation, oscillation_profile, fit_exponent
>>> profile = oscillation_profile(f, SpherePoint.one(2), radii, count=4000, sampler=SeededSampler(7))
>>> fit = fit_exponent(profile)
>>> fit.slope, fit.confidence_halfwidth
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats

from .config import DEFAULTS
from .errors import ConfigError, DomainError, FitError
from .sphere import NonisotropicBall, SeededSampler, SpherePoint, sample_ball

logger = logging.getLogger(__name__)


@dataclass
class OscillationEstimate:
    """nu(f, Q) estimated from samples of f on Q."""
    ball: Optional[NonisotropicBall]
    nu: float
    pivot: complex
    sample_count: int
    standard_error: float
    nu_mean_pivot: float = float('nan')
    flags: List[str] = field(default_factory=list)

    @property
    def radius(self) -> float:
        return self.ball.radius if self.ball is not None else float('nan')


@dataclass
class ExponentFit:
    """Least-squares fit of ``log value = intercept + slope * log scale``."""
    slope: float
    intercept: float
    r_squared: float
    radii: Tuple[float, ...]
    nu_values: Tuple[float, ...]
    confidence_halfwidth: float
    standard_errors: Tuple[float, ...] = ()
    dropped: List[Tuple[float, str]] = field(default_factory=list)
    weighted: bool = False

    def to_dict(self) -> dict:
        data = asdict(self)
        data['radii'] = list(self.radii)
        data['nu_values'] = list(self.nu_values)
        data['standard_errors'] = list(self.standard_errors)
        data['dropped'] = [list(item) for item in self.dropped]
        return data


# --- GEOMETRIC MEDIAN ---

def _objective(values: np.ndarray, pivot: complex) -> float:
    return float(np.mean(np.abs(values - pivot)))


def geometric_median(values: Sequence[complex], tol: float = None,
                     max_iter: int = None) -> Tuple[complex, bool]:
    """Weiszfeld iteration seeded at the mean, with the Vardi-Zhang step at sample points.

    Returns ``(pivot, converged)``.
    """
    tol = DEFAULTS.weiszfeld_tol if tol is None else tol
    max_iter = DEFAULTS.weiszfeld_max_iter if max_iter is None else max_iter
    v = np.asarray(values, dtype=complex).ravel()
    if v.size == 0:
        raise ConfigError("geometric_median needs at least one value")
    scale = max(1.0, float(np.max(np.abs(v - v[0]))))
    coincide = 1e-15 * scale

    y = complex(np.mean(v))
    for _ in range(max_iter):
        distance = np.abs(v - y)
        at_y = distance <= coincide
        others = ~at_y
        if not np.any(others):
            return y, True
        weights = 1.0 / distance[others]
        target = complex(np.sum(weights * v[others]) / np.sum(weights))
        multiplicity = int(np.count_nonzero(at_y))
        if multiplicity == 0:
            new_y = target
        else:
            pull = abs(complex(np.sum(weights * (v[others] - y))))
            if pull <= multiplicity:
                # subgradient condition: y is optimal
                return y, True
            share = multiplicity / pull
            new_y = (1.0 - share) * target + share * y
        if abs(new_y - y) <= tol * scale:
            return new_y, True
        y = new_y
    return y, False


def mean_oscillation(values: Sequence[complex], ball: NonisotropicBall = None,
                     min_samples: int = None) -> OscillationEstimate:
    """``nu = mean |value - a|`` minimized over ``a`` (the geometric median of the values)."""
    min_samples = DEFAULTS.min_oscillation_samples if min_samples is None else min_samples
    v = np.asarray(values, dtype=complex).ravel()
    if v.size < min_samples:
        raise ConfigError(f"mean_oscillation needs at least {min_samples} samples, got {v.size}")
    flags: List[str] = []
    mean = complex(np.mean(v))
    nu_mean = _objective(v, mean)

    if np.max(np.abs(v - v[0])) <= 1e-12 * max(1.0, abs(v[0])):
        return OscillationEstimate(ball, 0.0, complex(v[0]), v.size, 0.0, nu_mean, flags)

    pivot, converged = geometric_median(v)
    if not converged:
        median = complex(np.median(v.real), np.median(v.imag))
        logger.warning("Weiszfeld did not converge on %d values; falling back to the component-wise median",
                       v.size)
        flags.append("weiszfeld_fallback")
        if _objective(v, median) <= _objective(v, pivot):
            pivot = median
    if _objective(v, pivot) > nu_mean:
        pivot = mean

    deviation = np.abs(v - pivot)
    nu = float(np.mean(deviation))
    se = float(np.std(deviation, ddof=1) / math.sqrt(v.size))
    return OscillationEstimate(ball, nu, pivot, v.size, se, nu_mean, flags)


# --- PROFILES ---

def auto_count(radius: float, n: int, cap: int = None) -> int:
    """Per-ball sample count ``min(cap, max(1000, 50 / r^(n/2)))``."""
    cap = DEFAULTS.profile_count_max if cap is None else cap
    return int(min(cap, max(DEFAULTS.profile_count_min, math.ceil(50.0 / radius ** (n / 2.0)))))


def oscillation_profile(f: Callable[[np.ndarray], np.ndarray], center: SpherePoint,
                        radii: Sequence[float], count: Union[int, str], sampler: SeededSampler,
                        dilation: float = None, threads: int = 1,
                        method: str = "auto") -> List[OscillationEstimate]:
    """Mean oscillation of ``f`` on ``Q(center, r)`` for each radius.

    ``f`` maps a ``(count, n)`` array of points to values. When ``f.interior`` is true
    the ball of radius ``r`` is read through the dilate ``f((1 - dilation * r) * z)``.
    Radius ``k`` uses substream ``sampler.spawn(k)``, so results do not depend on
    ``threads``.
    """
    radii = [float(r) for r in radii]
    if any(r <= 0 or r > 2 for r in radii):
        raise ConfigError("oscillation radii must lie in (0, 2]")
    if any(b >= a for a, b in zip(radii, radii[1:])):
        raise ConfigError("oscillation radii must be strictly decreasing")
    kappa = DEFAULTS.dilation if dilation is None else dilation
    interior = bool(getattr(f, 'interior', False))
    n = center.n

    def one_radius(index: int) -> OscillationEstimate:
        radius = radii[index]
        per_ball = auto_count(radius, n) if count == "auto" else int(count)
        ball = NonisotropicBall(center, radius)
        points = sample_ball(ball, per_ball, sampler.spawn(index), method=method)
        coords = points.coords
        if interior:
            coords = (1.0 - kappa * radius) * coords
        estimate = mean_oscillation(f(coords), ball)
        logger.info("radius=%.4g count=%d nu=%.6g se=%.2g", radius, per_ball,
                    estimate.nu, estimate.standard_error)
        return estimate

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one_radius, range(len(radii))))
    return [one_radius(index) for index in range(len(radii))]


# --- FITTING ---

def fit_loglog(scales: Sequence[float], values: Sequence[float],
               standard_errors: Sequence[float] = None, weighted: bool = False,
               min_points: int = None, se_ratio: float = None,
               confidence: float = None) -> ExponentFit:
    """Fit ``log value`` against ``log scale``.

    Nonpositive values, and values whose standard error exceeds ``se_ratio * value``,
    are dropped and listed in ``ExponentFit.dropped``.
    """
    min_points = DEFAULTS.min_fit_scales if min_points is None else min_points
    se_ratio = DEFAULTS.se_ratio if se_ratio is None else se_ratio
    confidence = DEFAULTS.confidence if confidence is None else confidence
    x_all = np.asarray(scales, dtype=float)
    y_all = np.asarray(values, dtype=float)
    se_all = (np.zeros_like(y_all) if standard_errors is None
              else np.asarray(standard_errors, dtype=float))

    keep = np.ones(x_all.size, dtype=bool)
    dropped: List[Tuple[float, str]] = []
    for i, (x, y, se) in enumerate(zip(x_all, y_all, se_all)):
        if not y > 0:
            keep[i] = False
            dropped.append((float(x), "nonpositive"))
        elif se > se_ratio * y:
            keep[i] = False
            dropped.append((float(x), "noise"))
    if dropped:
        logger.warning("dropped %d scale(s) from the fit: %s", len(dropped), dropped)
    m = int(np.count_nonzero(keep))
    if m < min_points:
        raise FitError(f"Only {m} usable scales, need at least {min_points}")

    x, y, se = x_all[keep], y_all[keep], se_all[keep]
    lx, ly = np.log(x), np.log(y)
    design = np.column_stack([np.ones(m), lx])
    if weighted:
        if standard_errors is None or np.any(se <= 0):
            raise ConfigError("A weighted fit needs positive standard errors at every scale")
        sqrt_w = y / se
    else:
        sqrt_w = np.ones(m)
    coef, *_ = np.linalg.lstsq(design * sqrt_w[:, None], ly * sqrt_w, rcond=None)
    intercept, slope = float(coef[0]), float(coef[1])

    residuals = ly - design @ coef
    ss_res = float(np.sum((sqrt_w * residuals) ** 2))
    centred = ly - np.average(ly, weights=sqrt_w ** 2)
    ss_tot = float(np.sum((sqrt_w * centred) ** 2))
    r_squared = 1.0 if ss_tot <= 1e-300 else float(np.clip(1.0 - ss_res / ss_tot, 0.0, 1.0))

    dof = m - 2
    if dof <= 0:
        halfwidth = float('inf')
    else:
        lx_w = np.average(lx, weights=sqrt_w ** 2)
        sxx = float(np.sum((sqrt_w * (lx - lx_w)) ** 2))
        slope_se = math.sqrt(ss_res / dof / sxx) if sxx > 0 else float('inf')
        halfwidth = float(stats.t.ppf(0.5 + confidence / 2.0, dof) * slope_se)

    return ExponentFit(slope, intercept, r_squared, tuple(float(v) for v in x),
                       tuple(float(v) for v in y), halfwidth,
                       tuple(float(v) for v in se), dropped, weighted)


def fit_exponent(profile: Sequence[OscillationEstimate], weighted: bool = False,
                 min_scales: int = None) -> ExponentFit:
    """Measured "in average" Hoelder exponent: slope of log nu against log radius."""
    return fit_loglog([e.radius for e in profile], [e.nu for e in profile],
                      [e.standard_error for e in profile], weighted=weighted,
                      min_points=min_scales)


# --- EXPONENT ALGEBRA ---

def _check_alpha(alpha: float) -> None:
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")


@dataclass(frozen=True)
class Balance:
    """Threshold exponent and the two regime exponents it equalizes."""
    gamma: float
    small_modulus_exponent: float
    large_modulus_exponent: float

    def __float__(self) -> float:
        return self.gamma


def balance_exponents(alpha: float) -> Balance:
    """Solve ``gamma = 1 - gamma * (2/alpha - 1)``.

    With the threshold ``l^gamma = K * phi(1)`` the small-modulus bound is
    ``l^alpha + l^gamma`` and the large-modulus bound ``l^alpha + l^(1 - gamma*(2/alpha - 1))``.
    """
    _check_alpha(alpha)
    gamma = alpha / 2.0
    residual = gamma - (1.0 - gamma * (2.0 / alpha - 1.0))
    if abs(residual) > 1e-12:
        raise ArithmeticError(f"balance residual {residual}")
    small = min(alpha, gamma)
    large = min(alpha, 1.0 - gamma * (2.0 / alpha - 1.0))
    return Balance(gamma, small, large)


def theorem1_exponent(alpha: float, p: float, n: int) -> float:
    """``alpha * p / (p + n)``, checked against ``alpha / (n + 1 - n/q)``."""
    _check_alpha(alpha)
    if not p > 1:
        raise DomainError(f"p must exceed 1, got {p}")
    if math.isinf(p):
        return alpha
    q = p / (p - 1.0)
    value = alpha * p / (p + n)
    other = alpha / (n + 1.0 - n / q)
    if not math.isclose(value, other, rel_tol=1e-12, abs_tol=1e-14):
        raise ArithmeticError(f"exponent forms disagree: {value} vs {other}")
    return value


def young_exponent(p: float, n: int, eps: float) -> float:
    """q solving ``1 + 1/p = 1/q + 1/(p/n + eps)``."""
    if not (n >= 2 and p > n and eps > 0):
        raise DomainError(f"need p > n >= 2 and eps > 0, got p={p}, n={n}, eps={eps}")
    inverse_q = 1.0 + 1.0 / p - 1.0 / (p / n + eps)
    if inverse_q <= 0:
        raise DomainError(f"q undefined for p={p}, n={n}, eps={eps}")
    return 1.0 / inverse_q


def p1_check(p: float, n: int, eps: float) -> float:
    """``p1 = (n - 2) - p(q - 1)/q``; compared with ``n^2 eps/(p + n eps) - 1`` and checked > -1."""
    q = young_exponent(p, n, eps)
    p1 = (n - 2.0) - p * (q - 1.0) / q
    closed = n * n * eps / (p + n * eps) - 1.0
    if not math.isclose(p1, closed, rel_tol=1e-12, abs_tol=1e-12):
        raise ArithmeticError(f"p1 routes disagree: {p1} vs {closed}")
    if not p1 > -1.0:
        raise ArithmeticError(f"p1 = {p1} is not above -1")
    return p1


def sharpness_exponent(alpha: float, p: float, n: int, eps: float) -> float:
    """Disc exponent ``alpha * p2 / (p2 + 1)`` of the lifted sharpness example, ``p2 = p/n + eps``."""
    _check_alpha(alpha)
    p2 = p / n + eps
    return alpha * p2 / (p2 + 1.0)


def theorem_exponent(tag: str, alpha: float, p: float = None, n: int = 1) -> float:
    """Predicted exponent of nu(f, Q) for a theorem tag."""
    _check_alpha(alpha)
    if tag in ("A", "B", "T2", "balance"):
        return alpha / 2.0
    if tag == "KVM":
        if p is None or not p > 1:
            raise DomainError("KVM needs p > 1")
        return alpha * p / (p + 1.0)
    if tag in ("T1", "T4-sharpness"):
        if p is None:
            raise DomainError(f"{tag} needs p")
        return theorem1_exponent(alpha, p, n)
    raise ConfigError(f"No predicted exponent for tag '{tag}'")


__all__ = [
    "OscillationEstimate", "ExponentFit", "Balance", "geometric_median", "mean_oscillation",
    "auto_count", "oscillation_profile", "fit_loglog", "fit_exponent", "balance_exponents",
    "theorem1_exponent", "young_exponent", "p1_check", "sharpness_exponent", "theorem_exponent",
]
