from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .experiments.scenario import Scenario

# --- MATCHERS ---

DISC_TAGS = ("A", "B", "KVM")
BALL_TAGS = ("T1", "T2", "T4-sharpness")


def disc_match(scenario: 'Scenario') -> bool:
    return scenario.tag in DISC_TAGS


def ball_match(scenario: 'Scenario') -> bool:
    return scenario.tag in BALL_TAGS


def kernel_match(scenario: 'Scenario') -> bool:
    return scenario.tag == "L2.2-kernel"


def poisson_match(scenario: 'Scenario') -> bool:
    return scenario.tag == "P-lq"


def slice_match(scenario: 'Scenario') -> bool:
    return scenario.tag == "slice-B0"


def balance_match(scenario: 'Scenario') -> bool:
    return scenario.tag == "balance"


def mc_ball_match(scenario: 'Scenario') -> bool:
    """Ball scenarios that asked for Monte-Carlo evaluation of the outer function."""
    return ball_match(scenario) and scenario.evaluator == "mc"
