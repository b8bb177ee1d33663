"""Compiled inner loop of the limited random walk.

Mirrors ``engine.walk_step`` / ``prune`` / ``inflate_normalize`` exactly in
operation order; the numpy versions stay as the readable reference.
"""

import threading

import numpy as np
from numba import njit

_scratch = threading.local()


def scratch(n):
    """Per-thread slot map of length ``n``, all -1 between calls."""
    buf = getattr(_scratch, "slots", None)
    if buf is None or len(buf) < n:
        buf = np.full(max(n, 1), -1, dtype=np.int64)
        _scratch.slots = buf
    return buf


@njit(cache=True, nogil=True)
def _step(offsets, neighbors, idx, val, slots, eps, r):
    # transition: accumulate into slots in (owner, self-then-neighbours) order
    cap = 0
    for a in range(len(idx)):
        cap += offsets[idx[a] + 1] - offsets[idx[a]] + 1
    touched = np.empty(cap, dtype=np.int64)
    acc = np.zeros(cap)
    k = 0
    for a in range(len(idx)):
        j = idx[a]
        lo = offsets[j]
        hi = offsets[j + 1]
        share = val[a] / (hi - lo + 1.0)
        if slots[j] < 0:
            slots[j] = k
            touched[k] = j
            k += 1
        acc[slots[j]] += share
        for p in range(lo, hi):
            v = neighbors[p]
            if slots[v] < 0:
                slots[v] = k
                touched[k] = v
                k += 1
            acc[slots[v]] += share
    touched = touched[:k]
    order = np.argsort(touched, kind="mergesort")
    out_idx = np.empty(k, dtype=np.int64)
    out_val = np.empty(k)
    for a in range(k):
        v = touched[order[a]]
        out_idx[a] = v
        out_val[a] = acc[slots[v]]
    for a in range(k):
        slots[touched[a]] = -1

    # prune; degenerate case keeps the first maximum
    kept = 0
    for a in range(k):
        if out_val[a] >= eps:
            kept += 1
    if kept == 0:
        best = 0
        for a in range(1, k):
            if out_val[a] > out_val[best]:
                best = a
        res_idx = np.empty(1, dtype=np.int64)
        res_idx[0] = out_idx[best]
        return res_idx, np.ones(1)
    if kept < k:
        p_idx = np.empty(kept, dtype=np.int64)
        p_val = np.empty(kept)
        b = 0
        for a in range(k):
            if out_val[a] >= eps:
                p_idx[b] = out_idx[a]
                p_val[b] = out_val[a]
                b += 1
        out_idx, out_val = p_idx, p_val

    # inflate and normalise
    if r == 2.0:
        inf = out_val * out_val
    else:
        inf = out_val ** r
    s = inf.sum()
    if s == 0.0:
        best = 0
        for a in range(1, len(out_val)):
            if out_val[a] > out_val[best]:
                best = a
        res_idx = np.empty(1, dtype=np.int64)
        res_idx[0] = out_idx[best]
        return res_idx, np.ones(1)
    return out_idx, inf / s


@njit(cache=True, nogil=True)
def _l2(a_idx, a_val, b_idx, b_val):
    i = 0
    j = 0
    s = 0.0
    while i < len(a_idx) or j < len(b_idx):
        if j >= len(b_idx) or (i < len(a_idx) and a_idx[i] < b_idx[j]):
            s += a_val[i] * a_val[i]
            i += 1
        elif i >= len(a_idx) or b_idx[j] < a_idx[i]:
            s += b_val[j] * b_val[j]
            j += 1
        else:
            d = a_val[i] - b_val[j]
            s += d * d
            i += 1
            j += 1
    return np.sqrt(s)


@njit(cache=True, nogil=True)
def explore_kernel(offsets, neighbors, seed, r, t_max, eps, xi, slots):
    idx = np.empty(1, dtype=np.int64)
    idx[0] = seed
    val = np.ones(1)
    delta = np.inf
    max_support = 1
    t = 0
    converged = False
    while t < t_max:
        t += 1
        n_idx, n_val = _step(offsets, neighbors, idx, val, slots, eps, r)
        if len(n_idx) > max_support:
            max_support = len(n_idx)
        delta = _l2(n_idx, n_val, idx, val)
        idx = n_idx
        val = n_val
        if delta < xi:
            converged = True
            break
    return idx, val, t, converged, delta, max_support
