"""Multi-start bounded maximum-likelihood fitting of the weighted-utility model."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .actions import PayoffSpec
from .likelihood import ChoiceDataset, nll, nll_gradient
from .models import CPT_BOUNDS, CptParams, cpt_choice_prob

__all__ = ["FitResult", "fit_cpt", "rmse", "empirical_points"]

_LOWER = np.array([lo for lo, _ in CPT_BOUNDS.values()])
_UPPER = np.array([hi for _, hi in CPT_BOUNDS.values()])

# Two optima whose nll differs by less than this are treated as ties.
NLL_TIE_TOL = 1e-6


@dataclass
class FitResult:
    """Outcome of one multi-start fit.

    local_optima holds every distinct optimum found (sorted by nll,
    best first), so near-ties that signal weak identifiability stay
    visible instead of being silently discarded.
    """

    params: CptParams
    nll: float
    rmse: float
    restarts: int
    converged: bool
    local_optima: list[tuple[CptParams, float]] = field(default_factory=list)
    identifiable: bool = True
    n_levels: int = 0

    def to_dict(self) -> dict:
        # camelCase keys: this is the JSON wire form used by the CLI
        # and the HTTP service
        return {
            "params": {
                "alpha": self.params.alpha,
                "beta": self.params.beta,
                "effortCost": self.params.effort_cost,
                "determinism": self.params.determinism,
            },
            "nll": self.nll,
            "rmse": self.rmse,
            "restarts": self.restarts,
            "converged": self.converged,
            "identifiable": self.identifiable,
            "nLevels": self.n_levels,
            "localOptima": [
                {
                    "alpha": p.alpha,
                    "beta": p.beta,
                    "effortCost": p.effort_cost,
                    "determinism": p.determinism,
                    "nll": v,
                }
                for p, v in self.local_optima
            ],
        }


def empirical_points(dataset: ChoiceDataset, pool_rounds: bool = False):
    """Block-level (p_r, empirical p2) pairs.

    Round-tagged datasets yield one point per (round, level); pooling
    collapses rounds first. Entries with zero trials are skipped.
    """
    ds = dataset.pooled() if pool_rounds else dataset
    return [(lv.p_r, lv.p2) for lv in ds.levels if lv.n_total > 0]


def rmse(dataset: ChoiceDataset, curve, pool_rounds: bool = False) -> float:
    """Root-mean-square error between a model curve and the empirical
    block-level compensation probabilities.

    `curve` maps p_r to a predicted probability. With per-round tags
    present (the default protocol gives 10 points over two rounds) each
    block contributes its own point; pooled datasets contribute one
    point per level.
    """
    pts = empirical_points(dataset, pool_rounds=pool_rounds)
    if not pts:
        raise ValueError("dataset has no non-empty levels")
    errs = np.array([curve(p) - p2 for p, p2 in pts], dtype=float)
    return float(np.sqrt(np.mean(errs**2)))


def _lhs_starts(n_starts: int, seed) -> np.ndarray:
    sampler = qmc.LatinHypercube(d=4, seed=seed)
    return qmc.scale(sampler.random(n_starts), _LOWER, _UPPER)


def fit_cpt(
    dataset: ChoiceDataset,
    payoff: PayoffSpec = PayoffSpec(),
    n_starts: int = 16,
    seed: int = 0,
    max_iter: int = 500,
    cost_ceiling: float | None = None,
) -> FitResult:
    """Fit the weighted-utility model by bounded maximum likelihood.

    Runs `n_starts` L-BFGS-B minimizations of the nll from a Latin
    hypercube over the parameter box and keeps the best. Deterministic
    given the seed. Fewer than two distinct levels is allowed but the
    result is flagged non-identifiable.

    `cost_ceiling` shrinks the effort-cost upper bound; a fit with the
    ceiling at the cluster threshold, compared against the free fit,
    tells whether the data can distinguish a floor-level effort cost
    from the best explanation (the likelihood is often exactly flat
    along that direction).

    Returns:
        FitResult with the best parameters (exactly inside the box),
        its nll and block-level rmse, and all distinct local optima.
    """
    if n_starts < 1:
        raise ValueError("n_starts must be >= 1")
    n_levels = len(dataset.distinct_levels())

    lower, upper = _LOWER.copy(), _UPPER.copy()
    if cost_ceiling is not None:
        if not (lower[2] <= cost_ceiling <= upper[2]):
            raise ValueError("cost_ceiling must lie inside the effort-cost bounds")
        upper[2] = cost_ceiling
    bounds = list(zip(lower, upper))
    found: list[tuple[np.ndarray, float, bool]] = []
    for x0 in _lhs_starts(n_starts, seed):
        x0 = np.clip(x0, lower, upper)
        res = minimize(
            nll,
            x0,
            args=(dataset, payoff),
            jac=nll_gradient,
            method="L-BFGS-B",
            bounds=bounds,
            options={"maxiter": max_iter, "ftol": 1e-12, "gtol": 1e-9},
        )
        x = np.clip(res.x, lower, upper)  # guard one-ulp excursions
        found.append((x, float(nll(x, dataset, payoff)), bool(res.success)))

    # dedupe optima that coincide to optimizer precision
    distinct: list[tuple[np.ndarray, float, bool]] = []
    for x, v, ok in sorted(found, key=lambda t: t[1]):
        if not any(np.allclose(x, dx, atol=1e-5) for dx, _, _ in distinct):
            distinct.append((x, v, ok))

    best_x, best_v, best_ok = distinct[0]
    best = CptParams.from_array(best_x)
    local = [(CptParams.from_array(x), v) for x, v, _ in distinct]

    # weak identifiability: a near-tied optimum far away in curvature
    ties = [p for p, v in local if v - best_v < NLL_TIE_TOL]
    identifiable = n_levels >= 2 and all(
        abs(p.alpha - best.alpha) <= 0.5 for p in ties
    )

    return FitResult(
        params=best,
        nll=best_v,
        rmse=rmse(dataset, lambda p: cpt_choice_prob(p, best, payoff)),
        restarts=n_starts,
        converged=best_ok,
        local_optima=local,
        identifiable=identifiable,
        n_levels=n_levels,
    )
