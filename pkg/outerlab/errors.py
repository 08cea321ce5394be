"""Exceptions raised by outerlab.

Configuration problems subclass ``ValueError`` and runtime numerical failures
subclass ``RuntimeError`` so callers that only know the builtins still catch them.
The CLI maps the two families to exit codes 3 and 2.
"""


class OuterLabError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(OuterLabError, ValueError):
    """Unknown family, unknown key, or parameters outside their admissible range."""


class DimensionMismatchError(OuterLabError, ValueError):
    """Two points (or a point and a ball) live in different dimensions."""


class DomainError(OuterLabError, ValueError):
    """A kernel or evaluator was called outside the region where it is defined."""


class SamplingError(OuterLabError, RuntimeError):
    """Rejection sampling could not produce the requested points."""


class PrecisionError(OuterLabError, RuntimeError):
    """A Monte-Carlo estimate is too noisy to be returned."""


class FitError(OuterLabError, RuntimeError):
    """Not enough usable scales to fit an exponent."""


class ScenarioError(OuterLabError, RuntimeError):
    """A module error raised while running a scenario, with the scenario attached."""

    def __init__(self, scenario_name: str, cause: BaseException):
        self.scenario_name = scenario_name
        self.cause = cause
        super().__init__(f"scenario '{scenario_name}': {type(cause).__name__}: {cause}")


__all__ = [
    "OuterLabError", "ConfigError", "DimensionMismatchError", "DomainError",
    "SamplingError", "PrecisionError", "FitError", "ScenarioError",
]
