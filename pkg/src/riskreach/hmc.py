"""Hamiltonian Monte Carlo with dynamic (no-U-turn) trajectories.

Self-contained sampler over an arbitrary differentiable log density:
leapfrog integration, doubling trajectories with the no-U-turn stop
rule and slice acceptance, and dual-averaging step-size adaptation
toward a target acceptance statistic. Split R-hat and autocorrelation
ESS diagnostics live here too, so callers can gate on convergence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SampleRun",
    "nuts_sample",
    "split_rhat",
    "effective_sample_size",
    "standard_normal_self_test",
]

# Trajectories whose energy error exceeds this are treated as divergent.
DIVERGENCE_THRESHOLD = 1000.0


@dataclass
class SampleRun:
    """Posterior draws plus sampling metadata.

    draws has shape (chains, samples, dim); adaptation iterations are
    already discarded.
    """

    draws: np.ndarray
    step_sizes: np.ndarray
    mean_accept: float
    divergences: int
    algorithm: str = "nuts"

    @property
    def n_chains(self) -> int:
        return self.draws.shape[0]

    def flat(self) -> np.ndarray:
        return self.draws.reshape(-1, self.draws.shape[-1])


def _leapfrog(f, x, r, grad, eps):
    r_half = r + 0.5 * eps * grad
    x_new = x + eps * r_half
    logp_new, grad_new = f(x_new)
    r_new = r_half + 0.5 * eps * grad_new
    return x_new, r_new, logp_new, grad_new


def _joint(logp, r) -> float:
    return float(logp) - 0.5 * float(r @ r)


def _find_reasonable_epsilon(f, x, logp, grad, rng) -> float:
    eps = 1.0
    r0 = rng.standard_normal(x.size)
    joint0 = _joint(logp, r0)
    x1, r1, logp1, _ = _leapfrog(f, x, r0, grad, eps)
    joint1 = _joint(logp1, r1)
    while not np.isfinite(joint1):
        eps *= 0.5
        x1, r1, logp1, _ = _leapfrog(f, x, r0, grad, eps)
        joint1 = _joint(logp1, r1)
    direction = 1.0 if (joint1 - joint0) > math.log(0.5) else -1.0
    # double (or halve) until the one-step acceptance crosses 1/2
    while direction * (joint1 - joint0) > -direction * math.log(2.0):
        eps *= 2.0**direction
        if eps < 1e-10 or eps > 1e7:
            break
        x1, r1, logp1, _ = _leapfrog(f, x, r0, grad, eps)
        joint1 = _joint(logp1, r1)
        if not np.isfinite(joint1):
            if direction > 0:
                eps *= 0.5
                break
            continue
    return max(eps, 1e-10)


def _build_tree(f, x, r, grad, logp, log_u, v, depth, eps, joint0, rng, counters):
    """One recursive doubling. Returns the leftmost and rightmost
    states, a proposal drawn uniformly from the valid slice states, the
    subtree's slice count, and the continue flag."""
    if depth == 0:
        x1, r1, logp1, grad1 = _leapfrog(f, x, r, grad, v * eps)
        joint = _joint(logp1, r1) if np.isfinite(logp1) else -np.inf
        n_valid = int(log_u <= joint)
        not_divergent = log_u - DIVERGENCE_THRESHOLD < joint
        if not not_divergent:
            counters["divergences"] += 1
        alpha = min(1.0, math.exp(min(0.0, joint - joint0)))
        state = (x1, logp1, grad1)
        return (
            x1, r1, grad1, logp1,
            x1, r1, grad1, logp1,
            state, n_valid, not_divergent, alpha, 1,
        )

    (
        x_m, r_m, g_m, lp_m,
        x_p, r_p, g_p, lp_p,
        state, n_valid, keep, alpha, n_alpha,
    ) = _build_tree(f, x, r, grad, logp, log_u, v, depth - 1, eps, joint0, rng, counters)
    if keep:
        if v == -1:
            (
                x_m, r_m, g_m, lp_m,
                _, _, _, _,
                state2, n2, keep2, alpha2, n_alpha2,
            ) = _build_tree(f, x_m, r_m, g_m, lp_m, log_u, v, depth - 1, eps, joint0, rng, counters)
        else:
            (
                _, _, _, _,
                x_p, r_p, g_p, lp_p,
                state2, n2, keep2, alpha2, n_alpha2,
            ) = _build_tree(f, x_p, r_p, g_p, lp_p, log_u, v, depth - 1, eps, joint0, rng, counters)
        if n2 > 0 and rng.random() < n2 / max(n_valid + n2, 1):
            state = state2
        n_valid += n2
        span = x_p - x_m
        keep = keep2 and (span @ r_m >= 0) and (span @ r_p >= 0)
        alpha += alpha2
        n_alpha += n_alpha2
    return (
        x_m, r_m, g_m, lp_m,
        x_p, r_p, g_p, lp_p,
        state, n_valid, keep, alpha, n_alpha,
    )


def _sample_chain(f, x0, warmup, samples, rng, target_accept, max_depth):
    x = np.asarray(x0, dtype=float).copy()
    logp, grad = f(x)
    if not np.isfinite(logp):
        raise ValueError("initial point has non-finite log density")

    eps = _find_reasonable_epsilon(f, x, logp, grad, rng)
    mu = math.log(10.0 * eps)
    log_eps_bar, h_bar = 0.0, 0.0
    gamma, t0, kappa = 0.05, 10.0, 0.75

    counters = {"divergences": 0}
    draws = np.empty((samples, x.size))
    accepts = []
    for m in range(1, warmup + samples + 1):
        r0 = rng.standard_normal(x.size)
        joint0 = _joint(logp, r0)
        log_u = joint0 - rng.exponential()

        x_m = x_p = x
        r_m = r_p = r0
        g_m = g_p = grad
        lp_m = lp_p = logp
        state = (x, logp, grad)
        n_valid, keep, depth = 1, True, 0
        alpha_sum, n_alpha = 0.0, 1
        while keep and depth < max_depth:
            v = 1 if rng.random() < 0.5 else -1
            if v == -1:
                (
                    x_m, r_m, g_m, lp_m,
                    _, _, _, _,
                    state2, n2, keep2, alpha_sum, n_alpha,
                ) = _build_tree(f, x_m, r_m, g_m, lp_m, log_u, v, depth, eps, joint0, rng, counters)
            else:
                (
                    _, _, _, _,
                    x_p, r_p, g_p, lp_p,
                    state2, n2, keep2, alpha_sum, n_alpha,
                ) = _build_tree(f, x_p, r_p, g_p, lp_p, log_u, v, depth, eps, joint0, rng, counters)
            if keep2 and n2 > 0 and rng.random() < min(1.0, n2 / n_valid):
                state = state2
            n_valid += n2
            span = x_p - x_m
            keep = keep2 and (span @ r_m >= 0) and (span @ r_p >= 0)
            depth += 1

        x, logp, grad = state
        accept_stat = alpha_sum / max(n_alpha, 1)
        if m <= warmup:
            frac = 1.0 / (m + t0)
            h_bar = (1.0 - frac) * h_bar + frac * (target_accept - accept_stat)
            log_eps = mu - math.sqrt(m) / gamma * h_bar
            eta = m**-kappa
            log_eps_bar = eta * log_eps + (1.0 - eta) * log_eps_bar
            eps = math.exp(log_eps)
        else:
            eps = math.exp(log_eps_bar)
            draws[m - warmup - 1] = x
            accepts.append(accept_stat)
    return draws, math.exp(log_eps_bar), float(np.mean(accepts)), counters["divergences"]


def nuts_sample(
    logp_and_grad,
    x0,
    chains: int = 4,
    warmup: int = 500,
    samples: int = 1000,
    seed: int = 0,
    target_accept: float = 0.8,
    max_depth: int = 10,
) -> SampleRun:
    """Sample a log density with the no-U-turn sampler.

    Args:
        logp_and_grad: callable x -> (log density, gradient array).
        x0: shared initial point (typically a posterior mode); each
            chain jitters it slightly and uses an independent stream.

    Returns:
        SampleRun with draws of shape (chains, samples, dim).
    """
    if chains < 1 or warmup < 1 or samples < 1:
        raise ValueError("chains, warmup and samples must all be >= 1")
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    seed_seq = np.random.SeedSequence(seed)
    all_draws = np.empty((chains, samples, x0.size))
    step_sizes = np.empty(chains)
    accepts = np.empty(chains)
    divergences = 0
    for c, child in enumerate(seed_seq.spawn(chains)):
        rng = np.random.default_rng(child)
        start = x0 + 0.01 * rng.standard_normal(x0.size)
        draws, eps, acc, div = _sample_chain(
            logp_and_grad, start, warmup, samples, rng, target_accept, max_depth
        )
        all_draws[c] = draws
        step_sizes[c] = eps
        accepts[c] = acc
        divergences += div
    return SampleRun(
        draws=all_draws,
        step_sizes=step_sizes,
        mean_accept=float(accepts.mean()),
        divergences=divergences,
    )


def split_rhat(draws: np.ndarray) -> np.ndarray:
    """Split-chain potential scale reduction factor per dimension.

    draws: (chains, samples, dim). Values near 1 indicate the chains
    agree; above ~1.05 they have not mixed.
    """
    c, n, dim = draws.shape
    if n < 4:
        raise ValueError("need at least 4 samples per chain")
    half = n // 2
    split = np.concatenate([draws[:, :half], draws[:, half : 2 * half]], axis=0)
    m, n2, _ = split.shape
    chain_means = split.mean(axis=1)
    chain_vars = split.var(axis=1, ddof=1)
    w = chain_vars.mean(axis=0)
    b = n2 * chain_means.var(axis=0, ddof=1)
    var_plus = (n2 - 1) / n2 * w + b / n2
    return np.sqrt(var_plus / w)


def _autocovariance(x: np.ndarray) -> np.ndarray:
    n = x.size
    centered = x - x.mean()
    nfft = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(centered, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[:n]
    return acov / n


def effective_sample_size(draws: np.ndarray) -> np.ndarray:
    """Autocorrelation-based ESS per dimension (Geyer initial monotone
    positive sequence over split chains).

    draws: (chains, samples, dim).
    """
    c, n, dim = draws.shape
    if n < 8:
        raise ValueError("need at least 8 samples per chain")
    half = n // 2
    split = np.concatenate([draws[:, :half], draws[:, half : 2 * half]], axis=0)
    m, n2, _ = split.shape
    out = np.empty(dim)
    for d in range(dim):
        chains = split[:, :, d]
        acov = np.stack([_autocovariance(ch) for ch in chains])
        chain_var = acov[:, 0] * n2 / (n2 - 1)
        w = chain_var.mean()
        var_plus = w * (n2 - 1) / n2
        if m > 1:
            var_plus += chains.mean(axis=1).var(ddof=1)
        if var_plus <= 0 or not np.isfinite(var_plus):
            out[d] = float("nan")
            continue
        rho = 1.0 - (w - acov.mean(axis=0)) / var_plus
        rho[0] = 1.0
        # Geyer: sum consecutive pairs while positive, enforce monotone
        tau = 0.0
        prev_pair = np.inf
        t = 0
        while t + 1 < n2:
            pair = rho[t] + rho[t + 1]
            if pair <= 0:
                break
            pair = min(pair, prev_pair)
            tau += pair
            prev_pair = pair
            t += 2
        tau = max(2.0 * tau - 1.0, 1e-8)
        out[d] = m * n2 / tau
    return out


def standard_normal_self_test(
    dim: int = 2,
    chains: int = 4,
    warmup: int = 500,
    samples: int = 1000,
    seed: int = 0,
) -> dict:
    """Sampler health check against an independent standard normal.

    Returns the worst-dimension absolute mean error, variance error,
    and minimum ESS so callers can assert calibrated accuracy.
    """

    def logp_and_grad(x):
        return -0.5 * float(x @ x), -x

    run = nuts_sample(
        logp_and_grad, np.zeros(dim), chains=chains, warmup=warmup, samples=samples, seed=seed
    )
    flat = run.flat()
    ess = effective_sample_size(run.draws)
    return {
        "mean_abs_error": float(np.max(np.abs(flat.mean(axis=0)))),
        "var_abs_error": float(np.max(np.abs(flat.var(axis=0, ddof=1) - 1.0))),
        "min_ess": float(np.min(ess)),
        "max_rhat": float(np.max(split_rhat(run.draws))),
        "mean_accept": run.mean_accept,
        "divergences": run.divergences,
    }
