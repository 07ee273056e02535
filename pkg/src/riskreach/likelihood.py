"""Choice datasets and the negative log-likelihood of the weighted-utility model."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .actions import PayoffSpec
from .models import CptParams
from .numerics import sigmoid
from .validation import check_probability
from .weighting import prelec_weight

__all__ = ["ChoiceLevel", "ChoiceDataset", "nll", "nll_gradient", "sample_dataset", "PROB_FLOOR"]

# Probabilities are clamped to [PROB_FLOOR, 1 - PROB_FLOOR] before logs.
PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class ChoiceLevel:
    """Aggregated choices at one perturbation level.

    n_relax / n_compensate count HA1 / HA2 choices over every trial of
    the level, failed trials included. `round_index` is None when
    rounds have been pooled.
    """

    p_r: float
    n_relax: int
    n_compensate: int
    round_index: int | None = None

    def __post_init__(self):
        check_probability(self.p_r, "p_r")
        if self.n_relax < 0 or self.n_compensate < 0:
            raise ValueError("choice counts must be non-negative")

    @property
    def n_total(self) -> int:
        return self.n_relax + self.n_compensate

    @property
    def p2(self) -> float:
        """Empirical compensation probability at this level."""
        if self.n_total == 0:
            raise ValueError("empty level has no empirical probability")
        return self.n_compensate / self.n_total


@dataclass
class ChoiceDataset:
    """Per-level choice counts for one participant."""

    levels: list[ChoiceLevel] = field(default_factory=list)

    def __post_init__(self):
        if not self.levels:
            raise ValueError("dataset must contain at least one level")
        seen = set()
        for lv in self.levels:
            key = (lv.round_index, round(lv.p_r, 12))
            if key in seen:
                raise ValueError(f"duplicate level {lv.p_r} in round {lv.round_index}")
            seen.add(key)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(p_r, n_relax, n_compensate) as parallel arrays."""
        p = np.array([lv.p_r for lv in self.levels])
        n1 = np.array([lv.n_relax for lv in self.levels], dtype=float)
        n2 = np.array([lv.n_compensate for lv in self.levels], dtype=float)
        return p, n1, n2

    @property
    def n_trials(self) -> int:
        return sum(lv.n_total for lv in self.levels)

    def distinct_levels(self) -> list[float]:
        return sorted({lv.p_r for lv in self.levels})

    def pooled(self) -> "ChoiceDataset":
        """Merge rounds: one untagged entry per distinct level."""
        acc: dict[float, list[int]] = {}
        for lv in self.levels:
            n1, n2 = acc.setdefault(lv.p_r, [0, 0])
            acc[lv.p_r] = [n1 + lv.n_relax, n2 + lv.n_compensate]
        return ChoiceDataset(
            [ChoiceLevel(p, n1, n2) for p, (n1, n2) in sorted(acc.items())]
        )


def _choice_logits(theta: np.ndarray, p: np.ndarray, payoff: PayoffSpec) -> tuple[np.ndarray, np.ndarray]:
    """(logit, weight) arrays for raw parameter vector theta = (alpha,
    beta, effort_cost, determinism). Bypasses CptParams so optimizers
    can probe slightly outside the box during line searches."""
    a, b, c, lam = theta
    w = np.asarray(prelec_weight(p, a, b))
    return lam * (-c + (payoff.loss + payoff.reward) * w), w


def nll(theta, dataset: ChoiceDataset, payoff: PayoffSpec = PayoffSpec()) -> float:
    """Negative log-likelihood of per-level binomial choice counts.

    Choice probabilities are clamped to [1e-12, 1 - 1e-12] before the
    logs so degenerate parameter corners stay finite.

    Args:
        theta: CptParams or raw (alpha, beta, effort_cost, determinism).
        dataset: per-level counts (rounds may be tagged; the likelihood
            is identical whether or not rounds are pooled).
    """
    if isinstance(theta, CptParams):
        theta = theta.as_array()
    theta = np.asarray(theta, dtype=float)
    p, n1, n2 = dataset.arrays()
    z, _ = _choice_logits(theta, p, payoff)
    q2 = np.clip(sigmoid(z), PROB_FLOOR, 1.0 - PROB_FLOOR)
    q1 = np.clip(sigmoid(-z), PROB_FLOOR, 1.0 - PROB_FLOOR)
    return float(-(n2 * np.log(q2) + n1 * np.log(q1)).sum())


def nll_gradient(theta, dataset: ChoiceDataset, payoff: PayoffSpec = PayoffSpec()) -> np.ndarray:
    """Analytic gradient of `nll` wrt (alpha, beta, effort_cost, determinism).

    Matches the clamped objective: levels whose probability sits in a
    clamped flat region contribute zero, the same zero a finite
    difference of the clamped nll sees.
    """
    if isinstance(theta, CptParams):
        theta = theta.as_array()
    a, b, c, lam = np.asarray(theta, dtype=float)
    p, n1, n2 = dataset.arrays()
    z, w = _choice_logits(np.array([a, b, c, lam]), p, payoff)
    p2 = np.asarray(sigmoid(z))
    p1 = np.asarray(sigmoid(-z))
    in_band2 = (p2 > PROB_FLOOR) & (p2 < 1.0 - PROB_FLOOR)
    in_band1 = (p1 > PROB_FLOOR) & (p1 < 1.0 - PROB_FLOOR)
    # d nll / d z per level; sigmoid' = p2 * p1 done via the stable pair
    resid = -(n2 * p1 * in_band2 - n1 * p2 * in_band1)

    with np.errstate(divide="ignore"):
        t = -np.log(p)  # (0, inf]
    scale = lam * (payoff.loss + payoff.reward)
    # w * t**a and w * t**a * log t both vanish at t -> 0 and t -> inf
    interior = np.isfinite(t) & (t > 0)
    t_safe = np.where(interior, t, 1.0)
    ta = t_safe**a
    dz_da = np.where(interior & (w > 0), scale * w * (-b) * ta * np.log(t_safe), 0.0)
    dz_db = np.where(interior & (w > 0), scale * w * (-ta), 0.0)
    dz_dc = np.full_like(p, -lam)
    dz_dlam = z / lam

    return np.array(
        [
            (resid * dz_da).sum(),
            (resid * dz_db).sum(),
            (resid * dz_dc).sum(),
            (resid * dz_dlam).sum(),
        ]
    )


def sample_dataset(
    levels,
    trials_per_level: int,
    choice_prob,
    seed: int | None = 0,
) -> ChoiceDataset:
    """Draw binomial choice counts at each level from a probability curve.

    `choice_prob` maps a level to the compensation probability (e.g. a
    closure over cpt_choice_prob). Used to build synthetic datasets for
    recovery studies without running the full reaching protocol.
    """
    rng = np.random.default_rng(seed)
    out = []
    for p in levels:
        prob = float(choice_prob(p))
        n2 = int(rng.binomial(trials_per_level, prob))
        out.append(ChoiceLevel(float(p), trials_per_level - n2, n2))
    return ChoiceDataset(out)
