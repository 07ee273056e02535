"""Input validation helpers used by the public API surface."""

from __future__ import annotations

import numpy as np

__all__ = ["check_probability", "check_positive", "check_in_range"]


def check_probability(p, name: str = "p"):
    """Validate a probability (scalar or array) lies in [0, 1].

    Returns the value as float / float ndarray. Raises ValueError on
    values outside the unit interval or non-finite entries.
    """
    arr = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {p!r}")
    if arr.ndim == 0:
        return float(arr)
    return arr


def check_positive(x, name: str = "value") -> float:
    x = float(x)
    if not np.isfinite(x) or x <= 0.0:
        raise ValueError(f"{name} must be a positive finite number, got {x!r}")
    return x


def check_in_range(x, lo: float, hi: float, name: str = "value") -> float:
    """Validate lo <= x <= hi (closed interval)."""
    x = float(x)
    if not np.isfinite(x) or x < lo or x > hi:
        raise ValueError(f"{name} must lie in [{lo}, {hi}], got {x!r}")
    return x
