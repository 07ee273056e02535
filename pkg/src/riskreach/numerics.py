"""Overflow-safe scalar/array numerics shared across the package."""

from __future__ import annotations

import numpy as np

__all__ = ["sigmoid", "softplus", "log_sigmoid"]


def sigmoid(z):
    """Element-wise logistic function, safe for large |z|.

    Branches on the sign so exp() is only ever called on non-positive
    values; never overflows, returns values in [0, 1].
    """
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    if out.ndim == 0:
        return float(out)
    return out


def softplus(z):
    """log(1 + exp(z)) without overflow: max(z, 0) + log1p(exp(-|z|))."""
    z = np.asarray(z, dtype=float)
    out = np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))
    if out.ndim == 0:
        return float(out)
    return out


def log_sigmoid(z):
    """log(sigmoid(z)) computed as -softplus(-z)."""
    return -softplus(-np.asarray(z, dtype=float))
