"""Hot loops behind the scoring metrics.

Two implementations of each kernel live here: explicit loops compiled with
numba, and a vectorised pure-numpy path. ``EVCOREF_NUMBA=0`` (or a missing
numba install) selects the numpy path; the public names ``contingency`` and
``max_weight_assignment`` are bound once at import time.
"""

from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("EVCOREF_NUMBA", "1").strip().lower()
_WANT_NUMBA = _FLAG not in ("0", "false", "no", "off")

try:
    import numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def _maybe_njit(fn):
    if HAVE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


# --- contingency matrix -----------------------------------------------------

def _contingency_loop(key_labels, resp_labels, n_key, n_resp):
    out = np.zeros((n_key, n_resp), dtype=np.int64)
    for t in range(key_labels.shape[0]):
        out[key_labels[t], resp_labels[t]] += 1
    return out


contingency_numba = _maybe_njit(_contingency_loop)


def contingency_numpy(key_labels, resp_labels, n_key, n_resp):
    flat = np.asarray(key_labels, dtype=np.int64) * n_resp + np.asarray(resp_labels, np.int64)
    return np.bincount(flat, minlength=n_key * n_resp).reshape(n_key, n_resp).astype(np.int64)


# --- maximum-weight assignment ---------------------------------------------
#
# Shortest augmenting path with potentials (Kuhn-Munkres, O(n^3)) on the
# cost matrix max(w) - w, padded to square. Row i of the result holds the
# column assigned to row i of the padded problem.

def _assignment_loop(cost):
    n = cost.shape[0]
    inf = np.inf
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, dtype=np.int64)
    way = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, inf)
        used = np.zeros(n + 1, dtype=np.bool_)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = inf
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    row_to_col = np.zeros(n, dtype=np.int64)
    for j in range(1, n + 1):
        row_to_col[p[j] - 1] = j - 1
    return row_to_col


_assignment_numba = _maybe_njit(_assignment_loop)


def _assignment_vectorised(cost):
    n = cost.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, dtype=np.int64)
    way = np.zeros(n + 1, dtype=np.int64)
    padded = np.zeros((n + 1, n + 1))
    padded[1:, 1:] = cost
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used
            free[0] = False
            cur = padded[i0] - u[i0] - v
            better = free & (cur < minv)
            minv[better] = cur[better]
            way[better] = j0
            masked = np.where(free, minv, np.inf)
            j1 = int(np.argmin(masked))
            delta = masked[j1]
            u[p[used]] += delta
            v[used] -= delta
            minv[~used] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    row_to_col = np.empty(n, dtype=np.int64)
    row_to_col[p[1:] - 1] = np.arange(n)
    return row_to_col


def _square_cost(weights):
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 2:
        raise ValueError("weights must be a 2-d matrix")
    n = max(w.shape)
    sq = np.zeros((n, n))
    sq[: w.shape[0], : w.shape[1]] = w
    top = sq.max() if sq.size else 0.0
    return w, top - sq


def _finish(w, row_to_col):
    rows, cols = w.shape
    pairs = [(i, int(row_to_col[i])) for i in range(rows) if row_to_col[i] < cols]
    total = float(sum(w[i, j] for i, j in pairs))
    return pairs, total


def assignment_numba(weights):
    """Maximum-weight matching of a (possibly rectangular) weight matrix.

    Returns ``(pairs, total)`` where ``pairs`` lists matched (row, col)
    indices in row order; rows matched only to padding are omitted.
    """
    w, cost = _square_cost(weights)
    if cost.size == 0:
        return [], 0.0
    return _finish(w, _assignment_numba(cost))


def assignment_numpy(weights):
    w, cost = _square_cost(weights)
    if cost.size == 0:
        return [], 0.0
    return _finish(w, _assignment_vectorised(cost))


if HAVE_NUMBA and _WANT_NUMBA:
    BACKEND = "numba"
    contingency = contingency_numba
    max_weight_assignment = assignment_numba
else:
    BACKEND = "numpy"
    contingency = contingency_numpy
    max_weight_assignment = assignment_numpy
