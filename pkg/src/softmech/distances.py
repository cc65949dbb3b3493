"""Distances, divergences and subordinate matrix norms.

Vector side: p-norm distances, Renyi divergences on the simplex (order 1 is
KL, order inf is the log max likelihood ratio), and log-domain p-norm
distances for positive vectors.

Matrix side: the (p,q)-subordinate norm max ||Ax||_q / ||x||_p.  Computing it
is NP-hard in general; for q=1 and even p (or p=inf) it reduces to a maximum
over sign vectors of the rows' dual norm, which we enumerate exactly for up
to 24 rows.  A row-wise dual-norm upper bound and a seeded Monte-Carlo lower
bound sandwich the exact value everywhere else.
"""

from __future__ import annotations

import numpy as np

from .simplex import check_distribution
from .smmatrix import harmonic

_SIGN_ROW_CAP = 24
_SIGN_CHUNK = 1 << 14


def lp_distance(x, y, p: float) -> float:
    """p-norm of x - y; p may be any real >= 1 or inf."""
    a = np.asarray(x, dtype=float)
    b = np.asarray(y, dtype=float)
    if a.shape != b.shape:
        raise ValueError("dimension mismatch")
    if not p >= 1:
        raise ValueError("p must be >= 1")
    diff = np.abs(a - b)
    if np.isinf(p):
        return float(diff.max(initial=0.0))
    if p == 1:
        return float(diff.sum())
    return float((diff**p).sum() ** (1.0 / p))


def renyi_divergence(x, y, order: float) -> float:
    """Order-alpha Renyi divergence between simplex points.

    order=1 is the KL divergence (terms with x_i = 0 contribute 0), order=inf
    is log max_i x_i/y_i over the support of x.  Returns +inf when y misses
    mass where x has some; infinity is a value, not an error.
    """
    p = check_distribution(x)
    q = check_distribution(y)
    if p.shape != q.shape:
        raise ValueError("dimension mismatch")
    if not order >= 1:
        raise ValueError("order must be >= 1")
    p = np.maximum(p, 0.0)
    q = np.maximum(q, 0.0)
    support = p > 0
    if np.any(q[support] == 0):
        return float("inf")
    ps, qs = p[support], q[support]
    if np.isinf(order):
        return float(np.log(np.max(ps / qs)))
    if order == 1:
        return float(np.sum(ps * np.log(ps / qs)))
    s = float(np.sum(ps**order / qs ** (order - 1.0)))
    return float(np.log(s) / (order - 1.0))


def log_lp_distance(x, y, p: float) -> float:
    """p-norm distance between coordinatewise logs; needs positive vectors."""
    a = np.asarray(x, dtype=float)
    b = np.asarray(y, dtype=float)
    if np.any(a <= 0) or np.any(b <= 0):
        raise ValueError("log-domain distance needs strictly positive entries")
    return lp_distance(np.log(a), np.log(b), p)


def _dual_exponent(p: float) -> float:
    if np.isinf(p):
        return 1.0
    if p == 1:
        return float("inf")
    return p / (p - 1.0)


def _vector_norm(v: np.ndarray, p: float, axis=None) -> np.ndarray:
    if np.isinf(p):
        return np.abs(v).max(axis=axis)
    if p == 1:
        return np.abs(v).sum(axis=axis)
    return (np.abs(v) ** p).sum(axis=axis) ** (1.0 / p)


def subordinate_norm_exact(A, p: float, target_q: float = 1.0) -> float:
    """Exact ||A||_{p,1} for even p or p=inf, by sign enumeration.

    The maximizing input can be assumed to make every row product nonzero,
    and first-order conditions then pin it to a sign pattern: the norm equals
    max over s in {-1,1}^t of the dual-norm ||s^T A||_{p/(p-1)} (1 for
    p=inf).  The s -> -s symmetry halves the enumeration; more than 24 rows
    raises a capacity error pointing at subordinate_norm_sampled.
    """
    if target_q != 1:
        raise ValueError("exact computation only supports target norm q=1")
    if not (np.isinf(p) or (float(p).is_integer() and p >= 2 and int(p) % 2 == 0)):
        raise ValueError("p must be an even integer >= 2 or inf")
    M = np.asarray(A, dtype=float)
    if M.ndim != 2:
        raise ValueError("A must be a matrix")
    t = M.shape[0]
    if t > _SIGN_ROW_CAP:
        raise ValueError(
            f"{t} rows exceeds the sign-enumeration cap {_SIGN_ROW_CAP}; "
            "use subordinate_norm_sampled for a lower bound"
        )
    r = _dual_exponent(p)
    total = 1 << (t - 1)  # fix s[0] = +1
    best = 0.0
    bits = np.arange(t - 1, dtype=np.int64)
    for start in range(0, total, _SIGN_CHUNK):
        codes = np.arange(start, min(start + _SIGN_CHUNK, total), dtype=np.int64)
        signs = np.ones((codes.size, t))
        signs[:, 1:] = 1.0 - 2.0 * ((codes[:, None] >> bits[None, :]) & 1)
        vals = _vector_norm(signs @ M, r, axis=1)
        best = max(best, float(vals.max(initial=0.0)))
    return best


def subordinate_norm_row_bound(A, p: float, q: float) -> float:
    """Row-wise dual-norm upper bound on ||A||_{p,q}.

    Each output coordinate is a row inner product, bounded by the row's
    p-dual norm; combining the per-row bounds with the q-norm gives
    (sum_i ||a_i||_{p/(p-1)}^q)^{1/q}.
    """
    M = np.asarray(A, dtype=float)
    if M.ndim != 2:
        raise ValueError("A must be a matrix")
    if not p >= 1 or not q >= 1:
        raise ValueError("p and q must be >= 1")
    rows = _vector_norm(M, _dual_exponent(p), axis=1)
    return float(_vector_norm(rows, q))


def subordinate_norm_sampled(A, p: float, q: float, trials: int, rng_seed: int) -> float:
    """Seeded Monte-Carlo lower bound on ||A||_{p,q}.

    Evaluates ||Ax||_q over unit-p-norm directions: all coordinate
    directions, random sign vectors, and Gaussian draws.  Any returned value
    is attained by a concrete direction, so it certifies a lower bound.
    """
    M = np.asarray(A, dtype=float)
    if M.ndim != 2:
        raise ValueError("A must be a matrix")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    d = M.shape[1]
    rng = np.random.default_rng(np.random.SeedSequence(entropy=rng_seed))
    dirs = [np.eye(d)]
    n_signs = max(1, trials // 2)
    dirs.append(1.0 - 2.0 * rng.integers(0, 2, size=(n_signs, d)))
    dirs.append(rng.standard_normal((max(1, trials - n_signs), d)))
    best = 0.0
    for block in dirs:
        norms = _vector_norm(block, p, axis=1)
        keep = norms > 0
        unit = block[keep] / norms[keep, None]
        vals = _vector_norm(unit @ M.T, q, axis=1)
        best = max(best, float(vals.max(initial=0.0)))
    return best


def sm_norm_bound(k: int, p: float, q: float) -> float:
    """Closed-form bound 2 * min(p+1, q/(q-1), H_k) on the (p,q)-subordinate
    norm of the k-active soft-max matrix.

    H_k is the harmonic number: the enumeration proof bounds each |s^T
    column_j| by twice the diagonal 2/j, and summing gives 2*H_k.  The
    harmonic sum is the rigorous small-k constant (2*log k already fails at
    k=2, where the exact (inf,1) norm is 2).  q=1 disables the middle term.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not p >= 1 or not q >= 1:
        raise ValueError("p and q must be >= 1")
    p_term = float("inf") if np.isinf(p) else p + 1.0
    if q == 1:
        q_term = float("inf")
    elif np.isinf(q):
        q_term = 1.0
    else:
        q_term = q / (q - 1.0)
    return 2.0 * min(p_term, q_term, harmonic(k))


def metric_from_id(metric_id: str):
    """Resolve a metric id to a distance callable.

    Vector metrics: ``l1``, ``l2``, ``linf``, ``lp:P`` and log-domain
    variants ``log-l1`` etc.  Simplex divergences: ``kl``, ``dinf``,
    ``renyi:ALPHA``.
    """
    mid = metric_id.strip().lower()
    if mid == "kl":
        return lambda a, b: renyi_divergence(a, b, 1.0)
    if mid == "dinf":
        return lambda a, b: renyi_divergence(a, b, float("inf"))
    if mid.startswith("renyi:"):
        alpha = float(mid.split(":", 1)[1])
        return lambda a, b: renyi_divergence(a, b, alpha)
    log_domain = mid.startswith("log-")
    core = mid[4:] if log_domain else mid
    if core.startswith("lp:"):
        p = float(core.split(":", 1)[1])
    elif core == "linf":
        p = float("inf")
    elif core.startswith("l"):
        p = float(core[1:])
    else:
        raise ValueError(f"unknown metric id {metric_id!r}")
    if log_domain:
        return lambda a, b: log_lp_distance(a, b, p)
    return lambda a, b: lp_distance(a, b, p)


def metric_exponent(metric_id: str) -> float:
    """The p (or alpha) carried by a metric id, for use in theoretical bounds."""
    mid = metric_id.strip().lower()
    if mid == "kl":
        return 1.0
    if mid == "dinf":
        return float("inf")
    if mid.startswith("renyi:"):
        return float(mid.split(":", 1)[1])
    core = mid[4:] if mid.startswith("log-") else mid
    if core.startswith("lp:"):
        return float(core.split(":", 1)[1])
    if core == "linf":
        return float("inf")
    return float(core[1:])
