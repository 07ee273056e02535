"""Two-parameter probability weighting (Prelec form)."""

from __future__ import annotations

import numpy as np

from .validation import check_positive, check_probability

__all__ = ["prelec_weight"]


def prelec_weight(p, alpha: float, beta: float):
    """Prelec weighting function w(p) = exp(-beta * (-ln p)^alpha).

    alpha < 1 produces the classic inverse-S distortion (small
    probabilities overweighted), alpha > 1 an S shape; beta shifts the
    curve's elevation. alpha = beta = 1 is the identity. Endpoints are
    defined by their limits: w(0) = 0 and w(1) = 1.

    Args:
        p: probability, scalar or array, in [0, 1].
        alpha: curvature, > 0.
        beta: elevation, > 0.

    Returns:
        Weighted probability with the same shape as `p`, in [0, 1].
    """
    alpha = check_positive(alpha, "alpha")
    beta = check_positive(beta, "beta")
    arr = np.asarray(check_probability(p, "p"), dtype=float)
    with np.errstate(divide="ignore"):
        t = -np.log(arr)  # in (0, inf]; 0 exactly at p = 1
    # inf**alpha -> inf and exp(-inf) -> 0, so the p = 0 limit falls out
    w = np.exp(-beta * t**alpha)
    if w.ndim == 0:
        return float(w)
    return w
