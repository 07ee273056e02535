"""Choice models: weighted-utility (CPT-style) and logistic baseline.

Both models map the perturbation probability p_r of a block to the
probability that the human compensates. The weighted-utility model
treats compensation as a sure payoff and distorts the perturbation
probability with a Prelec weight; the logistic baseline is a plain
sigmoid in p_r.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .actions import PayoffSpec
from .numerics import sigmoid
from .validation import check_in_range, check_positive, check_probability
from .weighting import prelec_weight

__all__ = [
    "CptParams",
    "BlrParams",
    "CPT_BOUNDS",
    "INTERCEPT_CAP",
    "delta_utility",
    "action_utilities",
    "dual_weighted_utilities",
    "cpt_choice_prob",
    "softmax_choice",
    "blr_choice_prob",
]

# Fitting box for CptParams, (lower, upper) per field. The box is part
# of the model contract: fitted parameters never leave it.
CPT_BOUNDS: dict[str, tuple[float, float]] = {
    "alpha": (0.5, 3.0),
    "beta": (0.5, 5.0),
    "effort_cost": (0.01, 5.0),
    "determinism": (1.0, 30.0),
}

# Reported logistic intercepts are capped here; see estimation docs.
INTERCEPT_CAP = 10.0


@dataclass(frozen=True)
class CptParams:
    """Weighted-utility model parameters.

    alpha: curvature of the probability weight.
    beta: elevation of the probability weight.
    effort_cost: subjective cost of compensating.
    determinism: inverse temperature of the choice rule (higher means
        closer to always picking the higher-utility action).
    """

    alpha: float
    beta: float
    effort_cost: float
    determinism: float

    def __post_init__(self):
        for name, (lo, hi) in CPT_BOUNDS.items():
            check_in_range(getattr(self, name), lo, hi, name)

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha, self.beta, self.effort_cost, self.determinism])

    @classmethod
    def from_array(cls, theta) -> "CptParams":
        a, b, c, d = np.asarray(theta, dtype=float)
        return cls(a, b, c, d)


@dataclass(frozen=True)
class BlrParams:
    """Logistic baseline parameters: compensation probability is
    sigmoid(intercept + slope * p_r)."""

    intercept: float
    slope: float

    def __post_init__(self):
        if not (np.isfinite(self.intercept) and np.isfinite(self.slope)):
            raise ValueError("logistic parameters must be finite")
        if self.intercept > INTERCEPT_CAP + 1e-9:
            raise ValueError(f"intercept exceeds the reporting cap {INTERCEPT_CAP}")


def delta_utility(p_r, params: CptParams, payoff: PayoffSpec = PayoffSpec()):
    """Utility advantage of compensating over relaxing at level p_r.

    delta = -effort_cost + (loss + reward) * w(p_r), where w is the
    Prelec weight. Compensation is treated as a sure outcome, so only
    the perturbation branch is probability-weighted. The effort cost is
    read from `params` (the fitted quantity); `payoff` supplies the
    reward/loss scale.
    """
    w = prelec_weight(p_r, params.alpha, params.beta)
    d = -params.effort_cost + (payoff.loss + payoff.reward) * np.asarray(w)
    if d.ndim == 0:
        return float(d)
    return d


def action_utilities(p_r, params: CptParams, payoff: PayoffSpec = PayoffSpec()):
    """(relax, compensate) utilities whose difference is delta_utility.

    Relaxing is a gamble between the reward (robot assists) and the
    loss (robot perturbs, weighted w(p_r)); compensating is the sure
    payoff reward - effort_cost.
    """
    w = np.asarray(prelec_weight(p_r, params.alpha, params.beta))
    u_relax = payoff.reward * (1.0 - w) - payoff.loss * w
    u_comp = np.full_like(np.asarray(w), payoff.reward - params.effort_cost)
    if u_relax.ndim == 0:
        return float(u_relax), float(u_comp)
    return u_relax, u_comp


def dual_weighted_utilities(p_r, params: CptParams, payoff: PayoffSpec = PayoffSpec()):
    """(relax, compensate) utilities with BOTH branch probabilities
    Prelec-weighted.

    General form kept for completeness; not used in fitting. It departs
    from `action_utilities` whenever w(p) + w(1-p) != 1, because the
    weights of complementary events need not sum to one.
    """
    p = np.asarray(check_probability(p_r, "p_r"))
    w_perturb = np.asarray(prelec_weight(p, params.alpha, params.beta))
    w_assist = np.asarray(prelec_weight(1.0 - p, params.alpha, params.beta))
    u_relax = payoff.reward * w_assist - payoff.loss * w_perturb
    sure = payoff.reward - params.effort_cost
    u_comp = sure * w_assist + sure * w_perturb
    if u_relax.ndim == 0:
        return float(u_relax), float(u_comp)
    return u_relax, u_comp


def cpt_choice_prob(p_r, params: CptParams, payoff: PayoffSpec = PayoffSpec()):
    """Probability of compensating at level p_r:
    sigmoid(determinism * delta_utility)."""
    return sigmoid(params.determinism * delta_utility(p_r, params, payoff))


def softmax_choice(utilities, determinism: float) -> np.ndarray:
    """Softmax choice probabilities over a set of action utilities.

    Uses max-subtraction so large determinism * utility products cannot
    overflow. With two actions this reduces exactly to the sigmoid of
    the utility difference.
    """
    determinism = check_positive(determinism, "determinism")
    u = np.asarray(utilities, dtype=float)
    if u.ndim != 1 or u.size < 2:
        raise ValueError("utilities must be a 1-d array of at least two actions")
    z = determinism * u
    z = z - np.max(z)
    ez = np.exp(z)
    return ez / ez.sum()


def blr_choice_prob(p_r, params: BlrParams):
    """Logistic-baseline compensation probability at level p_r.

    p_r enters on its natural unit-interval scale (0.3 means 30%).
    """
    p = check_probability(p_r, "p_r")
    return sigmoid(params.intercept + params.slope * np.asarray(p))
