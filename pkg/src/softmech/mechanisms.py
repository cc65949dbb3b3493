"""Soft-max mechanisms: maps from option values to distributions over options.

Four smooth selectors plus a sparse baseline:

* ``exp_mechanism``   -- weights proportional to exp(lambda * value); translation invariant.
* ``power_mechanism`` -- weights proportional to value**lambda; scale invariant.
* ``plsoftmax``       -- piecewise-linear selector built from the exact
  zero-column-sum matrices in :mod:`softmech.smmatrix`; every option it can
  return is within ``delta`` of the maximum value.
* ``log_plsoftmax``   -- ``plsoftmax`` on log-values; multiplicative guarantee.
* ``sparsemax``       -- Euclidean projection onto the simplex.

Approximation diagnostics (``additive_gap``, ``multiplicative_gap``,
``worst_case_support_ok``) quantify how much value each selector gives up.
All functions are pure; randomness never enters this module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .simplex import SUPPORT_EPS, as_values, finalize_distribution

_PARAM_NAMES = {
    "exp": "lambda",
    "pow": "lambda",
    "plsoftmax": "delta",
    "logplsoftmax": "delta",
    "sparsemax": None,
}


@dataclass(frozen=True)
class SortPermutation:
    """Permutation sorting a vector into non-increasing order.

    ``order[r]`` is the original index holding the rank-r value (x[order] is
    sorted non-increasing); ``inverse[i]`` is the rank of coordinate i.  Ties
    are broken by ascending original index.
    """

    order: np.ndarray
    inverse: np.ndarray


def sorting_permutation(x) -> SortPermutation:
    """Stable non-increasing sort permutation of x (ties by ascending index)."""
    v = as_values(x)
    order = np.argsort(-v, kind="stable")
    inverse = np.empty_like(order)
    inverse[order] = np.arange(v.size)
    return SortPermutation(order=order, inverse=inverse)


def active_count(sorted_x, delta: float) -> int:
    """Largest k such that sorted_x[0] - sorted_x[k-1] <= delta.

    The comparison is exact (no epsilon): the selector is continuous across
    the k boundary, so float jitter only moves between agreeing pieces.
    Input must already be non-increasing.
    """
    xs = as_values(sorted_x)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if np.any(np.diff(xs) > 0):
        raise ValueError("input must be sorted non-increasing")
    return int(np.count_nonzero(xs[0] - xs <= delta))


def exp_mechanism(x, lam: float) -> np.ndarray:
    """Normalized exp(lam * x).  The max is subtracted first, which is exact
    by translation invariance and keeps the exponentials in range."""
    v = as_values(x)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    w = np.exp(lam * (v - v.max()))
    return w / w.sum()


def power_mechanism(x, lam: float) -> np.ndarray:
    """Normalized x**lam for nonnegative x with at least one positive entry.

    0**lam is taken as 0.  Evaluated through logs of the positive entries so
    large powers do not overflow.
    """
    v = as_values(x)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if np.any(v < 0):
        raise ValueError("power mechanism needs nonnegative values")
    pos = v > 0
    if not np.any(pos):
        raise ValueError("power mechanism needs at least one positive value")
    logs = np.log(v[pos])
    w = np.zeros_like(v)
    w[pos] = np.exp(lam * (logs - logs.max()))
    return w / w.sum()


def _active_prefix_image(xs: np.ndarray, k: int) -> np.ndarray:
    """Apply the exact k-active matrix to a sorted vector, in float.

    Row i (0-based, i < k) of the product is
        xs[i]/(i+1) - xs[0]/k - sum_{j=i+1..k-1} xs[j] / ((j+1) j),
    which is the matrix-vector product evaluated via a suffix sum in O(k).
    Rows at and beyond k are zero.
    """
    d = xs.size
    y = np.zeros(d)
    if k >= 1:
        suffix = np.zeros(k)
        if k >= 2:
            cols = np.arange(1, k)
            t = xs[1:k] / ((cols + 1) * cols)
            suffix[: k - 1] = np.cumsum(t[::-1])[::-1]
        y[:k] = xs[:k] / np.arange(1, k + 1) - xs[0] / k - suffix
    return y


def plsoftmax(x, delta: float) -> np.ndarray:
    """Piecewise-linear soft-max with worst-case additive slack delta.

    Sorts x, finds the active count k (values within delta of the max),
    applies the exact k-active matrix scaled by 1/delta, adds the uniform
    prefix 1/k, and undoes the sort.  Support is confined to coordinates
    with x_i >= max(x) - delta.
    """
    v = as_values(x)
    if delta <= 0:
        raise ValueError("delta must be positive")
    order = np.argsort(-v, kind="stable")
    xs = v[order]
    k = int(np.count_nonzero(xs[0] - xs <= delta))
    f_sorted = _active_prefix_image(xs, k) / delta
    f_sorted[:k] += 1.0 / k
    out = np.empty_like(v)
    out[order] = f_sorted
    return finalize_distribution(out)


def log_plsoftmax(x, delta: float) -> np.ndarray:
    """plsoftmax on coordinatewise logs; needs strictly positive values.

    Worst-case multiplicative slack is 1 - exp(-delta) <= delta; see
    :func:`multiplicative_guarantee`.
    """
    v = as_values(x, positive=True)
    return plsoftmax(np.log(v), delta)


def multiplicative_guarantee(delta: float) -> float:
    """Worst-case multiplicative slack of a log-domain selector with additive
    slack delta: 1 - exp(-delta).  Reported in diagnostics rather than the
    looser bound delta itself."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    return float(-np.expm1(-delta))


def sparsemax(x) -> np.ndarray:
    """Euclidean projection of x onto the probability simplex.

    Standard sort-and-threshold: find the largest prefix whose shifted values
    stay positive, subtract the prefix threshold, clip at zero.
    """
    v = as_values(x)
    d = v.size
    z = np.sort(v)[::-1]
    cssv = np.cumsum(z) - 1.0
    ind = np.arange(1, d + 1)
    rho = int(np.count_nonzero(z - cssv / ind > 0))
    tau = cssv[rho - 1] / rho
    return finalize_distribution(np.maximum(v - tau, 0.0))


def additive_gap(x, p) -> float:
    """max(x) minus the expected value under p."""
    v = as_values(x)
    q = np.asarray(p, dtype=float)
    if q.shape != v.shape:
        raise ValueError("dimension mismatch")
    return float(v.max() - v @ q)


def multiplicative_gap(x, p) -> float:
    """1 - (expected value under p) / max(x); needs a positive maximum."""
    v = as_values(x)
    q = np.asarray(p, dtype=float)
    if q.shape != v.shape:
        raise ValueError("dimension mismatch")
    mx = v.max()
    if mx <= 0:
        raise ValueError("multiplicative gap needs a positive maximum value")
    return float(1.0 - (v @ q) / mx)


def worst_case_support_ok(x, p, delta: float, *, slack: float = 1e-9) -> bool:
    """True iff every coordinate carrying probability is within delta of the max."""
    v = as_values(x)
    q = np.asarray(p, dtype=float)
    if q.shape != v.shape:
        raise ValueError("dimension mismatch")
    support = q > SUPPORT_EPS
    return bool(np.all(v[support] >= v.max() - delta - slack))


@dataclass(frozen=True)
class MechanismSpec:
    """Dispatchable mechanism description: kind plus its positive parameter.

    Canonical spellings: ``exp:lambda=V``, ``pow:lambda=V``,
    ``plsoftmax:delta=V``, ``logplsoftmax:delta=V``, ``sparsemax``.
    """

    kind: str
    param: float | None = None

    def __post_init__(self):
        if self.kind not in _PARAM_NAMES:
            raise ValueError(f"unknown mechanism kind {self.kind!r}")
        needs = _PARAM_NAMES[self.kind]
        if needs is None:
            if self.param is not None:
                raise ValueError(f"{self.kind} takes no parameter")
        else:
            if self.param is None or not self.param > 0:
                raise ValueError(f"{self.kind} needs a positive {needs}")

    @classmethod
    def parse(cls, text: str) -> "MechanismSpec":
        name, sep, rest = text.strip().partition(":")
        name = name.lower()
        if name not in _PARAM_NAMES:
            raise ValueError(f"unknown mechanism {name!r}")
        expected = _PARAM_NAMES[name]
        if not sep:
            return cls(name, None)
        key, eq, value = rest.partition("=")
        if expected is None or key != expected or not eq:
            raise ValueError(f"bad mechanism spec {text!r}; expected "
                             f"{name if expected is None else f'{name}:{expected}=VALUE'}")
        return cls(name, float(value))

    def label(self) -> str:
        if self.param is None:
            return self.kind
        return f"{self.kind}:{_PARAM_NAMES[self.kind]}={self.param:.12g}"

    @property
    def positive_domain(self) -> bool:
        return self.kind in ("pow", "logplsoftmax")

    @property
    def translation_invariant(self) -> bool:
        return self.kind in ("exp", "plsoftmax")

    @property
    def scale_invariant(self) -> bool:
        return self.kind in ("pow", "logplsoftmax")

    def __call__(self, x) -> np.ndarray:
        if self.kind == "exp":
            return exp_mechanism(x, self.param)
        if self.kind == "pow":
            return power_mechanism(x, self.param)
        if self.kind == "plsoftmax":
            return plsoftmax(x, self.param)
        if self.kind == "logplsoftmax":
            return log_plsoftmax(x, self.param)
        return sparsemax(x)
