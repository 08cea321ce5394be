__version__ = "0.1.0"

from .errors import (ConfigError, DimensionMismatchError, DomainError, FitError, OuterLabError,
                     PrecisionError, SamplingError, ScenarioError)
from .config import DEFAULTS, LabDefaults
from .sphere import (SeededSampler, SpherePoint, NonisotropicBall, SphereSample, niso_distance,
                     ball_contains, sample_sphere, sample_cap, sample_ball, cap_measure, ball_measure)
from .kernels import (cauchy_kernel, herglotz_kernel, im_cauchy, poisson_disc, poisson_lq_norm,
                      poisson_lq_scaling, kernel_diff_bound_check)
from .boundary import (ModulusProfile, family, list_families, make_modulus, holder_constant_at,
                       log_lp_norm, log_lp_norm_1d, slice_constant, norm_report)
from .outer import (DiscOuterEvaluator, disc_outer, lift_to_ball, ball_outer_from_lift, radial_dilate,
                    boundary_value, BallOuterEvaluator, ball_outer, slice_integral)
from .oscillation import (geometric_median, mean_oscillation, oscillation_profile, fit_loglog,
                          fit_exponent, balance_exponents, theorem1_exponent, young_exponent,
                          p1_check, sharpness_exponent, theorem_exponent)

# Import the runner modules to register them
from . import matchers as _matchers_module
from . import experiments
from .experiments import (Scenario, Report, parse_scenario, run_scenario, run_suite, runner, runners,
                          list_available_runners)

# Import data module for shipped suite configs
from . import data

__all__ = [
    "__version__", "OuterLabError", "ConfigError", "DimensionMismatchError", "DomainError",
    "SamplingError", "PrecisionError", "FitError", "ScenarioError",
    "DEFAULTS", "LabDefaults",
    "SeededSampler", "SpherePoint", "NonisotropicBall", "SphereSample", "niso_distance",
    "ball_contains", "sample_sphere", "sample_cap", "sample_ball", "cap_measure", "ball_measure",
    "cauchy_kernel", "herglotz_kernel", "im_cauchy", "poisson_disc", "poisson_lq_norm",
    "poisson_lq_scaling", "kernel_diff_bound_check",
    "ModulusProfile", "family", "list_families", "make_modulus", "holder_constant_at",
    "log_lp_norm", "log_lp_norm_1d", "slice_constant", "norm_report",
    "DiscOuterEvaluator", "disc_outer", "lift_to_ball", "ball_outer_from_lift", "radial_dilate",
    "boundary_value", "BallOuterEvaluator", "ball_outer", "slice_integral",
    "geometric_median", "mean_oscillation", "oscillation_profile", "fit_loglog", "fit_exponent",
    "balance_exponents", "theorem1_exponent", "young_exponent", "p1_check", "sharpness_exponent",
    "theorem_exponent", "experiments", "Scenario", "Report", "parse_scenario", "run_scenario",
    "run_suite", "runner", "runners", "list_available_runners", "data",
]
