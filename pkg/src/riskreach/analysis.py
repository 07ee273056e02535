"""From session logs to datasets, fits, strategy clusters, and curves."""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, replace

import numpy as np

from .actions import HumanAction
from .bayes import PosteriorSummary, blr_map, blr_posterior
from .fitting import NLL_TIE_TOL, FitResult, fit_cpt
from .likelihood import ChoiceDataset, ChoiceLevel
from .models import BlrParams, CptParams, blr_choice_prob, cpt_choice_prob
from .protocol import SessionLog, TrialRecord
from .validation import check_probability

ALWAYS_COMPENSATE = "AlwaysCompensate"
TRADE_OFF = "TradeOff"

# Strategy-cluster thresholds. A fitted effort cost at or below the
# floor margin, or empirical compensation saturated at every level,
# reads as the always-compensate strategy.
COST_FLOOR_MAX = 0.05
SATURATION_MIN_P2 = 0.9

CLUSTER_RULE = (
    "AlwaysCompensate iff fitted effortCost <= 0.05, or min pooled-level "
    "empirical p2 >= 0.9, or a refit constrained to effortCost <= 0.05 "
    "ties the free fit within 1e-6 nll; otherwise TradeOff"
)


def compensation_probability(block_trials: list[TrialRecord]) -> float:
    """Fraction of trials in a block on which the human compensated.

    Failed trials stay in the denominator: the total is every reach
    attempted in the block, not just the successful ones.
    """
    if not block_trials:
        raise ValueError("block has no trials")
    n2 = sum(t.human_action is HumanAction.COMPENSATE for t in block_trials)
    return n2 / len(block_trials)


def build_choice_dataset(log: SessionLog) -> ChoiceDataset:
    """Aggregate per-(round, level) action counts from a session log."""
    counts: dict[tuple[int, float], list[int]] = defaultdict(lambda: [0, 0])
    for t in log.trials:
        counts[(t.round, t.p_r)][t.human_action is HumanAction.COMPENSATE] += 1
    levels = tuple(
        ChoiceLevel(p_r, n1, n2, round_index=r)
        for (r, p_r), (n1, n2) in sorted(counts.items()))
    return ChoiceDataset(levels)


def min_pooled_p2(dataset: ChoiceDataset) -> float:
    """Smallest empirical compensation rate across pooled levels."""
    pooled = dataset.pooled()
    rates = [lv.p2 for lv in pooled.levels if lv.n_total > 0]
    if not rates:
        raise ValueError("dataset has no non-empty levels")
    return min(rates)


def classify_strategy(dataset: ChoiceDataset, fit: FitResult,
                      *, n_starts: int = 16, seed: int = 0) -> tuple[str, dict]:
    """Assign a strategy cluster from a fit and its dataset.

    Two direct triggers (negligible fitted effort cost, or saturated
    empirical compensation) plus a tie-breaker: when the free fit lands
    above the cost floor but a cost-constrained refit reaches the same
    likelihood, the data cannot tell the strategies apart and the
    floor-cost reading wins.
    """
    floor_p2 = min_pooled_p2(dataset)
    meta = {
        "rule": CLUSTER_RULE,
        "effortCost": fit.params.effort_cost,
        "minPooledP2": floor_p2,
        "constrainedGap": None,
    }
    if fit.params.effort_cost <= COST_FLOOR_MAX or floor_p2 >= SATURATION_MIN_P2:
        return ALWAYS_COMPENSATE, meta
    constrained = fit_cpt(dataset, n_starts=n_starts, seed=seed,
                          cost_ceiling=COST_FLOOR_MAX)
    gap = constrained.nll - fit.nll
    meta["constrainedGap"] = gap
    if gap < NLL_TIE_TOL:
        return ALWAYS_COMPENSATE, meta
    return TRADE_OFF, meta


def recovery_report(theta_true: CptParams, fit: FitResult, grid=None) -> dict:
    """Per-parameter absolute errors plus curve distance on a grid."""
    if grid is None:
        grid = np.linspace(0.0, 1.0, 101)
    grid = np.asarray(grid, dtype=float)
    check_probability(grid, "grid")
    true_curve = cpt_choice_prob(grid, theta_true)
    fit_curve = cpt_choice_prob(grid, fit.params)
    return {
        "paramErrors": {
            "alpha": abs(fit.params.alpha - theta_true.alpha),
            "beta": abs(fit.params.beta - theta_true.beta),
            "effortCost": abs(fit.params.effort_cost - theta_true.effort_cost),
            "determinism": abs(fit.params.determinism - theta_true.determinism),
        },
        "curveMaxAbsError": float(np.max(np.abs(fit_curve - true_curve))),
        "identifiable": fit.identifiable,
    }


def curve_export(params: CptParams | BlrParams, grid) -> list[tuple[float, float]]:
    """Sample a fitted choice curve on a grid for plotting or the UI."""
    grid = np.asarray(grid, dtype=float)
    check_probability(grid, "grid")
    if isinstance(params, CptParams):
        values = cpt_choice_prob(grid, params)
    elif isinstance(params, BlrParams):
        values = blr_choice_prob(grid, params)
    else:
        raise TypeError(f"unsupported params type: {type(params).__name__}")
    values = np.atleast_1d(np.asarray(values, dtype=float))
    return [(float(p), float(v)) for p, v in zip(np.atleast_1d(grid), values)]


@dataclass
class ParticipantSummary:
    """Everything the analysis pipeline knows about one participant."""

    participant_id: str
    dataset: ChoiceDataset
    cpt_fit: FitResult
    blr_map_params: BlrParams
    blr_posterior_summary: PosteriorSummary | None
    cluster: str
    cluster_meta: dict

    @property
    def empirical(self) -> list[tuple[int, float, float, int]]:
        """(round, p_r, empirical p2, n trials) per recorded level."""
        return [(lv.round_index if lv.round_index is not None else 0,
                 lv.p_r, lv.p2, lv.n_total)
                for lv in self.dataset.levels if lv.n_total > 0]

    def to_dict(self) -> dict:
        return {
            "participantId": self.participant_id,
            "empirical": [
                {"round": r, "pR": p, "p2": p2, "nTrials": n}
                for r, p, p2, n in self.empirical
            ],
            "cptFit": self.cpt_fit.to_dict(),
            "blrMap": {"intercept": self.blr_map_params.intercept,
                       "slope": self.blr_map_params.slope},
            "blrPosterior": (self.blr_posterior_summary.to_dict()
                             if self.blr_posterior_summary is not None else None),
            "cluster": self.cluster,
            "clusterMeta": self.cluster_meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def summarize_participant(log: SessionLog, *, n_starts: int = 16, seed: int = 0,
                          chains: int = 4, warmup: int = 500, samples: int = 1000,
                          posterior: bool = True) -> ParticipantSummary:
    """Run the full per-participant pipeline on one session log."""
    dataset = build_choice_dataset(log)
    fit = fit_cpt(dataset, n_starts=n_starts, seed=seed)
    map_params = blr_map(dataset)
    post = None
    if posterior:
        post = blr_posterior(dataset, chains=chains, warmup=warmup,
                             samples=samples, seed=seed)
    label, meta = classify_strategy(dataset, fit, n_starts=n_starts, seed=seed)
    return ParticipantSummary(log.participant_id, dataset, fit, map_params,
                              post, label, meta)


def cluster_participants(summaries, *, n_starts: int = 16, seed: int = 0):
    """Re-apply the cluster rule to a batch of summaries.

    Returns (labeled summaries, metadata). The rule is a pure function
    of each summary's fit and dataset, so relabeling is idempotent.
    """
    labeled = []
    labels = {}
    for summary in summaries:
        label, meta = classify_strategy(summary.dataset, summary.cpt_fit,
                                        n_starts=n_starts, seed=seed)
        labeled.append(replace(summary, cluster=label, cluster_meta=meta))
        labels[summary.participant_id] = label
    return labeled, {"rule": CLUSTER_RULE, "labels": labels}
