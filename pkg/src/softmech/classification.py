"""Training loss tied to the piecewise-linear soft-max.

For scores x and a target distribution q the loss has three nonnegative
parts: an order part (hinges on score inversions along q's sort order, up to
and including the first zero-probability coordinate), a support part (hinges
forcing exactly the delta-close scores to carry probability), and a square
part (squared distance between q and the linear selector piece indexed by
q's own order and support).  The total is zero exactly when the selector
applied to x returns q, and it is convex in x for fixed q.
"""

from __future__ import annotations

import numpy as np

from .mechanisms import plsoftmax
from .simplex import as_values, check_distribution
from .smmatrix import build_softmax_matrix, uniform_prefix

_HINGE_SMOOTH_TOL = 1e-7


def target_sort_permutation(q) -> np.ndarray:
    """Non-increasing sort order of the target, ties by ascending index."""
    qq = check_distribution(q)
    return np.argsort(-qq, kind="stable")


def _validated(x, q):
    xx = as_values(x)
    qq = check_distribution(q)
    if xx.shape != qq.shape:
        raise ValueError("scores and target must share a dimension")
    return xx, qq


def loss_ord(x, q) -> float:
    """Hinge penalty on score inversions along the target's sort order.

    Sums max(x[pi(i+1)] - x[pi(i)], 0) over consecutive ranks i from the top
    through the first coordinate outside q's support.  Ranks entirely outside
    the support are unordered by q (all ties at zero), so inversions there
    are not penalized; without this cut the loss could not vanish at the
    selector's own output.
    """
    xx, qq = _validated(x, q)
    order = target_sort_permutation(qq)
    support_size = int(np.count_nonzero(qq > 0))
    last = min(support_size, xx.size - 1)
    xs = xx[order]
    diffs = xs[1 : last + 1] - xs[:last]
    return float(np.maximum(diffs, 0.0).sum())


def loss_supp(x, q, delta: float) -> float:
    """Hinge penalty for support mismatch.

    Coordinates carrying probability must score within delta of the top
    target coordinate's score; coordinates carrying none must not.
    """
    xx, qq = _validated(x, q)
    if delta <= 0:
        raise ValueError("delta must be positive")
    top = xx[int(np.argmax(qq))]  # first max index, matching the tie rule
    in_support = qq > 0
    inside = np.maximum(top - xx[in_support] - delta, 0.0).sum()
    outside = np.maximum(xx[~in_support] - top + delta, 0.0).sum()
    return float(inside + outside)


def _piece_map(q: np.ndarray, delta: float) -> tuple[np.ndarray, np.ndarray]:
    """Affine map (M, b) of the selector piece indexed by q's order and support."""
    d = q.size
    order = target_sort_permutation(q)
    k = max(1, int(np.count_nonzero(q > 0)))
    sm = build_softmax_matrix(k, d).to_float()
    P = np.zeros((d, d))
    P[np.arange(d), order] = 1.0  # row r picks the rank-r coordinate
    M = P.T @ sm @ P / delta
    b = P.T @ uniform_prefix(k, d)
    return M, b


def loss_sqr(x, q, delta: float) -> float:
    """Squared distance between q and its own selector piece applied to x."""
    xx, qq = _validated(x, q)
    if delta <= 0:
        raise ValueError("delta must be positive")
    M, b = _piece_map(qq, delta)
    r = qq - (M @ xx + b)
    return float(r @ r)


def loss_total(x, q, delta: float) -> float:
    """Sum of the order, support and square parts."""
    return loss_ord(x, q) + loss_supp(x, q, delta) + loss_sqr(x, q, delta)


def loss_grad(x, q, delta: float) -> np.ndarray:
    """Gradient of the total loss in x (a subgradient at hinge corners)."""
    xx, qq = _validated(x, q)
    if delta <= 0:
        raise ValueError("delta must be positive")
    g = np.zeros_like(xx)

    order = target_sort_permutation(qq)
    support_size = int(np.count_nonzero(qq > 0))
    last = min(support_size, xx.size - 1)
    for i in range(last):
        lo, hi = order[i], order[i + 1]
        if xx[hi] - xx[lo] > 0:
            g[hi] += 1.0
            g[lo] -= 1.0

    top = int(np.argmax(qq))
    in_support = qq > 0
    for i in np.flatnonzero(in_support):
        if xx[top] - xx[i] - delta > 0:
            g[top] += 1.0
            g[i] -= 1.0
    for i in np.flatnonzero(~in_support):
        if xx[i] - xx[top] + delta > 0:
            g[i] += 1.0
            g[top] -= 1.0

    M, b = _piece_map(qq, delta)
    r = qq - (M @ xx + b)
    g += -2.0 * (M.T @ r)
    return g


def _is_smooth_point(x: np.ndarray, q: np.ndarray, delta: float, tol: float) -> bool:
    order = target_sort_permutation(q)
    support_size = int(np.count_nonzero(q > 0))
    last = min(support_size, x.size - 1)
    xs = x[order]
    if np.any(np.abs(xs[1 : last + 1] - xs[:last]) <= tol):
        return False
    top = x[int(np.argmax(q))]
    in_support = q > 0
    args = np.concatenate([top - x[in_support] - delta, x[~in_support] - top + delta])
    return not np.any(np.abs(args) <= tol)


def subgradient_check(x, q, delta: float, fd_step: float = 1e-5) -> float | None:
    """Max relative error of the analytic gradient against central differences.

    Returns None (skip signal) when some hinge argument sits within 1e-7 of
    its corner, where the loss is not differentiable.
    """
    xx, qq = _validated(x, q)
    if not _is_smooth_point(xx, qq, delta, _HINGE_SMOOTH_TOL):
        return None
    grad = loss_grad(xx, qq, delta)
    worst = 0.0
    for i in range(xx.size):
        hi = xx.copy()
        lo = xx.copy()
        hi[i] += fd_step
        lo[i] -= fd_step
        fd = (loss_total(hi, qq, delta) - loss_total(lo, qq, delta)) / (2.0 * fd_step)
        scale = max(abs(fd), abs(grad[i]), 1.0)
        worst = max(worst, abs(grad[i] - fd) / scale)
    return worst


def convexity_probe(q, delta: float, trials: int, rng_seed: int, loss=None, scale: float = 2.0) -> float:
    """Max observed convexity violation of the loss in x for fixed q.

    Draws random (x1, x2, t) triples and measures
    loss(t x1 + (1-t) x2) - t loss(x1) - (1-t) loss(x2); for a convex loss
    the max stays at numerical-noise level.  A custom ``loss(x)`` callable can
    be probed instead, e.g. to confirm the probe flags a concave double.
    """
    qq = check_distribution(q)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if loss is None:
        loss = lambda xv: loss_total(xv, qq, delta)
    d = qq.size
    worst = -np.inf
    for i in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=rng_seed, spawn_key=(i,)))
        x1 = rng.normal(0.0, scale * max(delta, 1.0), size=d)
        x2 = rng.normal(0.0, scale * max(delta, 1.0), size=d)
        t = rng.random()
        violation = loss(t * x1 + (1 - t) * x2) - t * loss(x1) - (1 - t) * loss(x2)
        worst = max(worst, violation)
    return float(worst)


def zero_iff_residual(x, delta: float) -> float:
    """loss_total at the selector's own output; zero up to float noise."""
    xx = as_values(x)
    return loss_total(xx, plsoftmax(xx, delta), delta)
