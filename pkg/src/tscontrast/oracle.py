"""Deliberately slow reference implementations, used only by tests.

Nothing here shares code with the production modules: alignments are found by
exhaustive path enumeration, losses by nested scalar loops, gradients by
central finite differences.  Sizes are expected to be tiny.
"""
from __future__ import annotations

import math

import numpy as np


def _paths(ta: int, tb: int):
    """All monotone alignment paths from (0,0) to (ta-1, tb-1)."""
    def walk(i, j, prefix):
        if i == ta - 1 and j == tb - 1:
            yield prefix
            return
        if i + 1 < ta:
            yield from walk(i + 1, j, prefix + [(i + 1, j)])
        if j + 1 < tb:
            yield from walk(i, j + 1, prefix + [(i, j + 1)])
        if i + 1 < ta and j + 1 < tb:
            yield from walk(i + 1, j + 1, prefix + [(i + 1, j + 1)])

    yield from walk(0, 0, [(0, 0)])


def _step_cost(a, b, i, j):
    return math.sqrt(sum((a[i][d] - b[j][d]) ** 2 for d in range(len(a[0]))))


def _as_rows(x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    return x.tolist()


def brute_dtw(a, b) -> float:
    """Minimum cumulative cost over every monotone path (lengths <= ~6)."""
    a, b = _as_rows(a), _as_rows(b)
    best = math.inf
    for path in _paths(len(a), len(b)):
        cost = sum(_step_cost(a, b, i, j) for i, j in path)
        best = min(best, cost)
    return best


def brute_dtw_best_path(a, b):
    """(cost, path) of the cheapest monotone alignment, enumerated."""
    a, b = _as_rows(a), _as_rows(b)
    best, best_path = math.inf, None
    for path in _paths(len(a), len(b)):
        cost = sum(_step_cost(a, b, i, j) for i, j in path)
        if cost < best:
            best, best_path = cost, path
    return best, best_path


def tam_from_path(path, ta: int, tb: int) -> float:
    """Advance/delay/in-phase proportions of a warping path."""
    advance = delay = phase = 0
    for (i0, j0), (i1, j1) in zip(path, path[1:]):
        di, dj = i1 - i0, j1 - j0
        if di == 0 and dj == 1:
            advance += 1
        elif di == 1 and dj == 0:
            delay += 1
        elif di == 1 and dj == 1:
            phase += 1
    p_adv = advance / (tb - 1) if tb > 1 else 0.0
    p_del = delay / (ta - 1) if ta > 1 else 0.0
    p_phase = phase / (min(ta, tb) - 1) if min(ta, tb) > 1 else 0.0
    return p_adv + p_del + (1.0 - p_phase)


def _scalar_dot(u, v):
    return sum(ui * vi for ui, vi in zip(u, v))


def _log_p_pair(rows, anchor: int, other: int) -> float:
    """log of exp(sim(anchor, other)) / sum_{k != anchor} exp(sim(anchor, k)),
    computed with scalar loops (max-shifted for stability)."""
    sims = [_scalar_dot(rows[anchor], rows[k]) for k in range(len(rows)) if k != anchor]
    mx = max(sims)
    denom = sum(math.exp(s - mx) for s in sims)
    return _scalar_dot(rows[anchor], rows[other]) - mx - math.log(denom)


def scalar_loss_eq3(reps, w) -> float:
    """Soft instance-wise loss: positive term plus soft-weighted terms over
    the remaining pairs, averaged over anchors (i, t)."""
    reps = np.asarray(reps, dtype=np.float64)
    two_n, t_len, _ = reps.shape
    n = two_n // 2
    w = np.asarray(w, dtype=np.float64)
    total = 0.0
    for t in range(t_len):
        rows = [reps[i, t].tolist() for i in range(two_n)]
        for i in range(two_n):
            pos = (i + n) % two_n
            li = -_log_p_pair(rows, i, pos)
            for j in range(two_n):
                if j == i or j == pos:
                    continue
                li -= w[i % n, j % n] * _log_p_pair(rows, i, j)
            total += li
    return total / (two_n * t_len)


def scalar_loss_eq6(reps, w_t) -> float:
    """Soft temporal loss on the doubled timestamp axis, averaged over
    anchors (i, t)."""
    reps = np.asarray(reps, dtype=np.float64)
    two_n, t_len, _ = reps.shape
    n = two_n // 2
    w_t = np.asarray(w_t, dtype=np.float64)
    total = 0.0
    for i in range(n):
        rows = [reps[i, t].tolist() for t in range(t_len)] + [
            reps[i + n, t].tolist() for t in range(t_len)
        ]
        for t in range(2 * t_len):
            pos = (t + t_len) % (2 * t_len)
            lt = -_log_p_pair(rows, t, pos)
            for s in range(2 * t_len):
                if s == t or s == pos:
                    continue
                lt -= w_t[t % t_len, s % t_len] * _log_p_pair(rows, t, s)
            total += lt
    return total / (n * 2 * t_len)


def infonce_instance(reps) -> float:
    """Textbook InfoNCE over stacked views: cross-view positives only."""
    reps = np.asarray(reps, dtype=np.float64)
    two_n, t_len, _ = reps.shape
    n = two_n // 2
    total = 0.0
    for t in range(t_len):
        rows = [reps[i, t].tolist() for i in range(two_n)]
        for i in range(two_n):
            total -= _log_p_pair(rows, i, (i + n) % two_n)
    return total / (two_n * t_len)


def infonce_temporal(reps) -> float:
    """Textbook InfoNCE along the doubled timestamp axis per instance."""
    reps = np.asarray(reps, dtype=np.float64)
    two_n, t_len, _ = reps.shape
    n = two_n // 2
    total = 0.0
    for i in range(n):
        rows = [reps[i, t].tolist() for t in range(t_len)] + [
            reps[i + n, t].tolist() for t in range(t_len)
        ]
        for t in range(2 * t_len):
            total -= _log_p_pair(rows, t, (t + t_len) % (2 * t_len))
    return total / (n * 2 * t_len)


def fd_gradient(f, params, h: float = 1e-5):
    """Central-difference gradient of scalar f with respect to a list of
    numpy arrays; mutates copies only."""
    grads = []
    for p in params:
        g = np.zeros_like(p)
        flat_p = p.ravel()
        flat_g = g.ravel()
        for idx in range(flat_p.size):
            orig = flat_p[idx]
            flat_p[idx] = orig + h
            up = f()
            flat_p[idx] = orig - h
            down = f()
            flat_p[idx] = orig
            flat_g[idx] = (up - down) / (2.0 * h)
        grads.append(g)
    return grads
