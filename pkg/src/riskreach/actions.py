"""Action vocabulary and payoff structure of the reaching task.

Each trial the robot either assists the reach or perturbs it, and the
human either relaxes (lets the robot act) or compensates (stiffens
against a possible perturbation). Wire names "HA1"/"HA2"/"RA1"/"RA2"
are frozen: they appear verbatim in logs and over HTTP.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

__all__ = ["HumanAction", "RobotAction", "PayoffSpec", "subjective_value", "outcome"]


class HumanAction(str, enum.Enum):
    RELAX = "HA1"
    COMPENSATE = "HA2"


class RobotAction(str, enum.Enum):
    ASSIST = "RA1"
    PERTURB = "RA2"


@dataclass(frozen=True)
class PayoffSpec:
    """Subjective payoff scale for one participant.

    reward: value of a successful reach.
    loss: magnitude lost when a perturbation hits an unprepared arm.
    effort_cost: cost of stiffening; may exceed reward for participants
        who strongly avoid effort. Must be >= 0.
    """

    reward: float = 1.0
    loss: float = 1.0
    effort_cost: float = 0.0

    def __post_init__(self):
        if self.reward <= 0 or self.loss <= 0:
            raise ValueError("reward and loss must be positive")
        if self.effort_cost < 0:
            raise ValueError("effort_cost must be non-negative")


def subjective_value(human: HumanAction, robot: RobotAction, payoff: PayoffSpec) -> float:
    """Payoff table entry for one (human, robot) action pair.

    Relaxing pays the reward under assistance and loses `loss` under a
    perturbation. Compensating always completes the reach but pays the
    effort cost, regardless of what the robot does.
    """
    if human is HumanAction.COMPENSATE:
        return payoff.reward - payoff.effort_cost
    if robot is RobotAction.ASSIST:
        return payoff.reward
    return -payoff.loss


def outcome(human: HumanAction, robot: RobotAction) -> bool:
    """Trial success rule: compensation always succeeds; relaxing
    succeeds only when the robot assists."""
    if human is HumanAction.COMPENSATE:
        return True
    return robot is RobotAction.ASSIST
