"""Numerical defaults and DSL value coercion."""

import re
from dataclasses import dataclass, field
from typing import Any, Tuple


@dataclass(frozen=True)
class LabDefaults:
    """Every tunable default used across the package.

    Functions accept keyword overrides and fall back to ``DEFAULTS.<field>``.
    """

    # boundary data
    floor: float = 1e-12
    slice_directions: int = 256
    slice_angles: int = 2 ** 12
    slice_refine: int = 64
    clamp_warning_fraction: float = 0.01

    # sampling
    acceptance_floor: float = 1e-6
    max_draws: int = 50_000_000
    batch_size: int = 65_536
    auto_cap_threshold: float = 0.05

    # kernels / evaluators
    delta_min: float = 1e-8
    disc_nodes: int = 2 ** 12
    disc_grading: int = 6
    subtraction_radius: float = 0.5
    ball_mc_count: int = 100_000
    ball_se_cap: float = 0.1
    importance_radius: float = 0.9
    ball_mc_growth: int = 16
    boundary_tol: float = 1e-6
    boundary_max_k: int = 30

    # oscillation
    weiszfeld_tol: float = 1e-10
    weiszfeld_max_iter: int = 500
    min_oscillation_samples: int = 30
    se_ratio: float = 1.0 / 3.0
    min_fit_scales: int = 4
    confidence: float = 0.95
    dilation: float = 1.0 / 16.0
    profile_count_min: int = 1_000
    profile_count_max: int = 20_000

    # experiments
    verdict_tolerance: float = 0.03
    float_digits: int = 12
    default_radii: Tuple[float, ...] = field(
        default_factory=lambda: tuple(2.0 ** -k for k in range(3, 13)))


DEFAULTS = LabDefaults()


_DYADIC = re.compile(r'^2\^(-?\d+)\.\.2\^(-?\d+)$')


def coerce_value(raw: str) -> Any:
    """Turn a DSL string value into a Python value.

    ``true``/``false`` become booleans, ``2^-3..2^-9`` becomes the dyadic tuple
    ``(2**-3, ..., 2**-9)``, comma lists become tuples, numbers become ints or floats,
    anything else stays a string.
    """
    value = raw.strip()
    lowered = value.lower()
    if lowered in ('true', 'yes', 'on'):
        return True
    if lowered in ('false', 'no', 'off'):
        return False

    match = _DYADIC.match(value.replace(' ', ''))
    if match:
        start, stop = int(match.group(1)), int(match.group(2))
        step = 1 if stop >= start else -1
        return tuple(2.0 ** k for k in range(start, stop + step, step))

    if ',' in value:
        return tuple(coerce_value(part) for part in value.split(',') if part.strip())

    if value.startswith('2^'):
        try:
            return 2.0 ** int(value[2:])
        except ValueError:
            pass
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        return value
