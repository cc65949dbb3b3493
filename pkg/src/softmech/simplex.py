"""Input validation for value vectors and probability-simplex points."""

from __future__ import annotations

import numpy as np

NEGATIVE_CLAMP = 1e-12
SUM_TOLERANCE = 1e-9
SUPPORT_EPS = 1e-12


def as_values(x, *, positive: bool = False) -> np.ndarray:
    """Validate and return a 1-D float vector of option values.

    Raises ValueError on non-finite entries, and on non-positive entries when
    ``positive`` is set (the multiplicative-mode mechanisms need x > 0).
    """
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if v.size < 1:
        raise ValueError("value vector must be non-empty")
    if not np.all(np.isfinite(v)):
        raise ValueError("value vector must be finite")
    if positive and not np.all(v > 0):
        raise ValueError("value vector must be strictly positive")
    return v


def finalize_distribution(raw: np.ndarray) -> np.ndarray:
    """Clamp rounding residue and renormalize a near-simplex vector.

    Entries in (-1e-12, 0) are set to 0 and the vector is renormalized; any
    entry at or below -1e-12 indicates a real bug and raises AssertionError.
    """
    p = np.asarray(raw, dtype=float)
    low = p.min(initial=0.0)
    if low <= -NEGATIVE_CLAMP:
        raise AssertionError(f"distribution entry {low} below clamping range")
    if low < 0.0:
        p = np.where(p < 0.0, 0.0, p)
    total = p.sum()
    if not np.isfinite(total) or total <= 0.0:
        raise AssertionError(f"distribution sums to {total}")
    return p / total


def check_distribution(p, *, neg_tol: float = NEGATIVE_CLAMP, sum_tol: float = SUM_TOLERANCE) -> np.ndarray:
    """Validate a simplex point: entries >= -neg_tol and total within sum_tol of 1."""
    q = np.asarray(p, dtype=float)
    if q.ndim != 1 or q.size < 1:
        raise ValueError("distribution must be a non-empty 1-D vector")
    if not np.all(np.isfinite(q)):
        raise ValueError("distribution must be finite")
    if q.min() < -neg_tol:
        raise ValueError(f"distribution entry {q.min()} is negative beyond tolerance")
    if abs(q.sum() - 1.0) > sum_tol:
        raise ValueError(f"distribution sums to {q.sum()}, not 1")
    return q
