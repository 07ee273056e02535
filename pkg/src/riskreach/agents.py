"""Synthetic choice agents for driving simulated sessions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .actions import HumanAction, PayoffSpec
from .models import BlrParams, CptParams, blr_choice_prob, cpt_choice_prob
from .validation import check_in_range


class Agent:
    """Base interface: map an announced disturbance level to an action."""

    def choose(self, p_r: float, rng: np.random.Generator) -> HumanAction:
        raise NotImplementedError


@dataclass(frozen=True)
class FixedAgent(Agent):
    """Plays the same action on every trial."""

    action: HumanAction

    def choose(self, p_r, rng):
        return self.action


@dataclass(frozen=True)
class ThresholdAgent(Agent):
    """Deterministic step policy: compensate iff p_r >= threshold."""

    threshold: float

    def __post_init__(self):
        check_in_range(self.threshold, 0.0, 1.0, "threshold")

    def choose(self, p_r, rng):
        if p_r >= self.threshold:
            return HumanAction.COMPENSATE
        return HumanAction.RELAX


@dataclass(frozen=True)
class CptAgent(Agent):
    """Samples actions from the weighted-utility choice curve."""

    params: CptParams
    payoff: PayoffSpec = field(default_factory=PayoffSpec)

    def choose(self, p_r, rng):
        p2 = cpt_choice_prob(p_r, self.params, self.payoff)
        # exactly one uniform per trial, so draw streams stay aligned
        if rng.random() < p2:
            return HumanAction.COMPENSATE
        return HumanAction.RELAX


@dataclass(frozen=True)
class BlrAgent(Agent):
    """Samples actions from a logistic curve over the level."""

    params: BlrParams

    def choose(self, p_r, rng):
        if rng.random() < blr_choice_prob(p_r, self.params):
            return HumanAction.COMPENSATE
        return HumanAction.RELAX


def agent_from_spec(name, *, theta=None, blr=None, threshold=None, payoff=None) -> Agent:
    """Build an agent from CLI-style arguments.

    ``name`` is one of always-ha1, always-ha2, threshold, cpt, blr. The
    stochastic agents take their parameters via ``theta`` (alpha, beta,
    effort cost, determinism) or ``blr`` (intercept, slope).
    """
    if name == "always-ha1":
        return FixedAgent(HumanAction.RELAX)
    if name == "always-ha2":
        return FixedAgent(HumanAction.COMPENSATE)
    if name == "threshold":
        if threshold is None:
            raise ValueError("threshold agent requires a threshold value")
        return ThresholdAgent(float(threshold))
    if name == "cpt":
        if theta is None:
            raise ValueError("cpt agent requires model parameters")
        params = theta if isinstance(theta, CptParams) else CptParams(*theta)
        return CptAgent(params, payoff if payoff is not None else PayoffSpec())
    if name == "blr":
        if blr is None:
            raise ValueError("blr agent requires intercept and slope")
        params = blr if isinstance(blr, BlrParams) else BlrParams(*blr)
        return BlrAgent(params)
    raise ValueError(f"unknown agent spec: {name!r}")
