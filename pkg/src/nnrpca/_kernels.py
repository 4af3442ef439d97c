"""Compiled inner loops for the l1 factorization objective.

Every routine works on a factor matrix ``W`` of shape ``(N, r)`` and an
observation list ``(rows, cols, X)``.  Rank-1 problems use ``r == 1``.  The
balance term ``alpha * |sum_{i<split} ||W_i||^2 - sum_{i>=split} ||W_i||^2|``
is active when ``split > 0``; the quartic regularizer when ``lam > 0``.
"""

import numpy as np
from numba import njit

REASON_MAX_ITERS = 0
REASON_PLATEAU = 1
REASON_STEP_FLOOR = 2

# Step lengths below this fraction of ||W|| can no longer move the iterate.
STEP_FLOOR_REL = 1e-16
MAX_HALVINGS = 60


@njit(cache=True)
def _sign(x):
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return -1.0
    return 0.0


@njit(cache=True)
def objective_value(W, rows, cols, X, split, alpha, lam, beta):
    N, r = W.shape
    f = 0.0
    for p in range(rows.shape[0]):
        i = rows[p]
        j = cols[p]
        s = 0.0
        for k in range(r):
            s += W[i, k] * W[j, k]
        f += abs(s - X[p])
    if split > 0 and alpha != 0.0:
        bal = 0.0
        for i in range(N):
            sq = 0.0
            for k in range(r):
                sq += W[i, k] * W[i, k]
            if i < split:
                bal += sq
            else:
                bal -= sq
        f += alpha * abs(bal)
    if lam != 0.0:
        reg = 0.0
        for i in range(N):
            for k in range(r):
                e = W[i, k] - beta
                if e > 0.0:
                    reg += e * e * e * e
        f += lam * reg
    return f


@njit(cache=True)
def objective_and_subgradient(W, rows, cols, X, split, alpha, lam, beta, G):
    """Fill ``G`` with the sign(0)=0 subgradient and return the objective."""
    N, r = W.shape
    for i in range(N):
        for k in range(r):
            G[i, k] = 0.0
    f = 0.0
    for p in range(rows.shape[0]):
        i = rows[p]
        j = cols[p]
        s = 0.0
        for k in range(r):
            s += W[i, k] * W[j, k]
        res = s - X[p]
        f += abs(res)
        sg = _sign(res)
        if sg != 0.0:
            for k in range(r):
                G[i, k] += sg * W[j, k]
                G[j, k] += sg * W[i, k]
    if split > 0 and alpha != 0.0:
        bal = 0.0
        for i in range(N):
            sq = 0.0
            for k in range(r):
                sq += W[i, k] * W[i, k]
            if i < split:
                bal += sq
            else:
                bal -= sq
        f += alpha * abs(bal)
        sb = _sign(bal)
        if sb != 0.0:
            for i in range(N):
                side = 1.0 if i < split else -1.0
                for k in range(r):
                    G[i, k] += 2.0 * alpha * sb * side * W[i, k]
    if lam != 0.0:
        reg = 0.0
        for i in range(N):
            for k in range(r):
                e = W[i, k] - beta
                if e > 0.0:
                    reg += e * e * e * e
                    G[i, k] += 4.0 * lam * e * e * e
        f += lam * reg
    return f


@njit(cache=True)
def subgradient_descent(W0, rows, cols, X, split, alpha, lam, beta,
                        mu0, q, max_iters, eps, stop_tol, window, trace_every,
                        travel_tol):
    N, r = W0.shape
    W = W0.copy()
    G = np.empty_like(W)
    best_W = W.copy()
    best_f = np.inf
    best_hist = np.empty(max_iters + 1)
    n_trace = max_iters // trace_every + 2
    trace = np.empty(n_trace)
    t = 0
    mu = mu0
    reason = REASON_MAX_ITERS
    k = 0
    while True:
        f = objective_and_subgradient(W, rows, cols, X, split, alpha, lam, beta, G)
        if f < best_f:
            best_f = f
            best_W[:, :] = W
        best_hist[k] = best_f
        if k % trace_every == 0:
            trace[t] = f
            t += 1
        gnorm = 0.0
        wnorm = 0.0
        for i in range(N):
            for c in range(r):
                gnorm += G[i, c] * G[i, c]
                wnorm += W[i, c] * W[i, c]
        gnorm = np.sqrt(gnorm)
        wnorm = np.sqrt(wnorm)
        # A stalled best value only counts once the remaining travel
        # sum_{j>=k} mu_j = mu / (1 - q) is negligible; before that a lucky
        # early iterate can stay unbeaten for many steps.
        if k >= window and mu <= travel_tol * (1.0 - q) * wnorm:
            old = best_hist[k - window]
            if old - best_f <= stop_tol * old:
                reason = REASON_PLATEAU
                break
        if k >= max_iters:
            reason = REASON_MAX_ITERS
            break
        if gnorm == 0.0:
            reason = REASON_PLATEAU
            break
        if mu <= STEP_FLOOR_REL * wnorm:
            reason = REASON_STEP_FLOOR
            break
        step = mu / gnorm
        # Positivity safeguard: halve the step on each coordinate that would
        # leave the open orthant, then floor whatever is still non-positive.
        for i in range(N):
            for c in range(r):
                g = G[i, c]
                s = step
                nxt = W[i, c] - s * g
                h = 0
                while nxt <= 0.0 and h < MAX_HALVINGS:
                    s *= 0.5
                    nxt = W[i, c] - s * g
                    h += 1
                if nxt < eps:
                    nxt = eps
                W[i, c] = nxt
        mu *= q
        k += 1
    return best_W, best_f, k, reason, trace[:t]
