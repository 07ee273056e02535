"""Bayesian logistic baseline: penalized MAP point estimates and NUTS posteriors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .hmc import effective_sample_size, nuts_sample, split_rhat
from .likelihood import ChoiceDataset
from .models import INTERCEPT_CAP, BlrParams
from .numerics import sigmoid, softplus

__all__ = ["PosteriorSummary", "blr_map", "blr_posterior"]

DEFAULT_PRIOR_SD = 5.0


@dataclass
class PosteriorSummary:
    """Posterior summary for (intercept, slope).

    ci95_width is the 97.5% minus the 2.5% sample quantile per
    parameter. diagnostics_ok is False when any split R-hat exceeds
    1.05 or any ESS falls below 400; callers must not report interval
    widths from a failed run.
    """

    mean: BlrParams
    sd: tuple[float, float]
    ci95_width: tuple[float, float]
    rhat: tuple[float, float]
    ess: tuple[float, float]
    chains: int
    n_samples: int
    diagnostics_ok: bool
    algorithm: str = "nuts"
    divergences: int = 0

    def to_dict(self) -> dict:
        # camelCase keys: JSON wire form shared by the CLI and service
        return {
            "mean": {"intercept": self.mean.intercept, "slope": self.mean.slope},
            "sd": {"intercept": self.sd[0], "slope": self.sd[1]},
            "ci95Width": {"intercept": self.ci95_width[0], "slope": self.ci95_width[1]},
            "rhat": {"intercept": self.rhat[0], "slope": self.rhat[1]},
            "ess": {"intercept": self.ess[0], "slope": self.ess[1]},
            "chains": self.chains,
            "nSamples": self.n_samples,
            "diagnosticsOk": self.diagnostics_ok,
            "algorithm": self.algorithm,
            "divergences": self.divergences,
        }


def _design(dataset: ChoiceDataset):
    p, n1, n2 = dataset.arrays()
    return p, n1, n2


def _log_posterior_and_grad(theta, p, n1, n2, prior_sd):
    b0, b1 = theta
    z = b0 + b1 * p
    # log lik = sum n2 log sig(z) + n1 log sig(-z)
    loglik = -(n2 * softplus(-z) + n1 * softplus(z)).sum()
    logprior = -(b0 * b0 + b1 * b1) / (2.0 * prior_sd * prior_sd)
    sz = np.asarray(sigmoid(z))
    resid = n2 - (n1 + n2) * sz
    grad = np.array(
        [
            resid.sum() - b0 / prior_sd**2,
            (p * resid).sum() - b1 / prior_sd**2,
        ]
    )
    return float(loglik + logprior), grad


def _map_optimize(p, n1, n2, prior_sd, fix_intercept=None):
    if fix_intercept is None:
        fun = lambda th: tuple(
            -v for v in _log_posterior_and_grad(th, p, n1, n2, prior_sd)
        )
        res = minimize(
            lambda th: fun(th)[0],
            np.zeros(2),
            jac=lambda th: fun(th)[1],
            method="L-BFGS-B",
            options={"ftol": 1e-14, "gtol": 1e-12, "maxiter": 500},
        )
        return res.x
    fun = lambda s: tuple(
        -v
        for v in _log_posterior_and_grad(
            np.array([fix_intercept, s[0]]), p, n1, n2, prior_sd
        )
    )
    res = minimize(
        lambda s: fun(s)[0],
        np.zeros(1),
        jac=lambda s: fun(s)[1][1:],
        method="L-BFGS-B",
        options={"ftol": 1e-14, "gtol": 1e-12, "maxiter": 500},
    )
    return np.array([fix_intercept, float(res.x[0])])


def blr_map(
    dataset: ChoiceDataset,
    prior_sd: float = DEFAULT_PRIOR_SD,
    cap: float = INTERCEPT_CAP,
) -> BlrParams:
    """Penalized maximum a posteriori logistic parameters.

    Maximizes the Bernoulli log-likelihood plus independent zero-mean
    Gaussian log-priors on intercept and slope. A participant who never
    relaxes makes the unpenalized likelihood unbounded in the intercept
    direction; that degenerate case is reported at the cap, with the
    slope re-optimized while the intercept is held there. The slope is
    never capped.
    """
    if prior_sd <= 0:
        raise ValueError("prior_sd must be positive")
    p, n1, n2 = _design(dataset)
    if n2.sum() + n1.sum() == 0:
        raise ValueError("dataset has no trials")
    if n1.sum() == 0:
        theta = _map_optimize(p, n1, n2, prior_sd, fix_intercept=cap)
        return BlrParams(float(theta[0]), float(theta[1]))
    theta = _map_optimize(p, n1, n2, prior_sd)
    if theta[0] > cap:
        theta = _map_optimize(p, n1, n2, prior_sd, fix_intercept=cap)
    return BlrParams(float(theta[0]), float(theta[1]))


def blr_posterior(
    dataset: ChoiceDataset,
    prior_sd: float = DEFAULT_PRIOR_SD,
    chains: int = 4,
    warmup: int = 500,
    samples: int = 1000,
    seed: int = 0,
    cap: float = INTERCEPT_CAP,
) -> PosteriorSummary:
    """NUTS posterior over (intercept, slope), initialized at the
    penalized mode.

    The sampled posterior itself is never capped; only the reported
    mean intercept is clipped at the cap, matching how point estimates
    are reported. Diagnostics (split R-hat, ESS) are computed per
    parameter and gate diagnostics_ok.
    """
    p, n1, n2 = _design(dataset)

    def logp_and_grad(theta):
        return _log_posterior_and_grad(theta, p, n1, n2, prior_sd)

    x0 = _map_optimize(p, n1, n2, prior_sd)
    run = nuts_sample(
        logp_and_grad, x0, chains=chains, warmup=warmup, samples=samples, seed=seed
    )
    flat = run.flat()
    mean = flat.mean(axis=0)
    sd = flat.std(axis=0, ddof=1)
    lo, hi = np.quantile(flat, [0.025, 0.975], axis=0)
    rhat = split_rhat(run.draws)
    ess = effective_sample_size(run.draws)
    ok = bool(np.all(rhat <= 1.05) and np.all(ess >= 400))
    return PosteriorSummary(
        mean=BlrParams(float(min(mean[0], cap)), float(mean[1])),
        sd=(float(sd[0]), float(sd[1])),
        ci95_width=(float(hi[0] - lo[0]), float(hi[1] - lo[1])),
        rhat=(float(rhat[0]), float(rhat[1])),
        ess=(float(ess[0]), float(ess[1])),
        chains=chains,
        n_samples=samples,
        diagnostics_ok=ok,
        algorithm=run.algorithm,
        divergences=run.divergences,
    )
