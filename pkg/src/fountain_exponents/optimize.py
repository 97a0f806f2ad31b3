"""Bounded 1-D maximization: grid search, zoom, then golden-section polish.

Every routine here is vectorized over independent problems. An objective
receives an array of shape ``(nprob, npts)`` and returns values of the same
shape, which lets one call solve e.g. the inner ``max over rho`` for a
thousand quadrature nodes at once.
"""
from __future__ import annotations

import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _clean(v: np.ndarray) -> np.ndarray:
    return np.where(np.isnan(v), -np.inf, v)


def golden_max(f, lo, hi, xtol: float):
    """Golden-section search for a maximum on each ``[lo[i], hi[i]]``.

    Assumes unimodality inside the bracket; callers bracket around a grid
    optimum so that holds for smooth objectives.
    """
    lo = np.array(lo, dtype=float, ndmin=1)
    hi = np.array(hi, dtype=float, ndmin=1)
    width = float(np.max(hi - lo)) if lo.size else 0.0
    if width <= xtol:
        x = (lo + hi) / 2
        return x, _clean(f(x[:, None])[:, 0])
    n_iter = int(math.ceil(math.log(xtol / width) / math.log(INV_PHI)))
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc = _clean(f(c[:, None])[:, 0])
    fd = _clean(f(d[:, None])[:, 0])
    for _ in range(n_iter):
        left = fc >= fd  # maximum lies in [lo, d]
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        nc = np.where(left, c, d)  # surviving interior point
        nfc = np.where(left, fc, fd)
        x_new = np.where(left, hi - INV_PHI * (hi - lo), lo + INV_PHI * (hi - lo))
        f_new = _clean(f(x_new[:, None])[:, 0])
        c = np.where(left, x_new, nc)
        fc = np.where(left, f_new, nfc)
        d = np.where(left, nc, x_new)
        fd = np.where(left, nfc, f_new)
    # pick the better interior point
    better_c = fc >= fd
    return np.where(better_c, c, d), np.where(better_c, fc, fd)


def maximize(f, lo, hi, *, steps: int = 64, rounds: int = 1, xtol: float = 1e-9):
    """Maximize ``f`` over ``[lo, hi]`` for a batch of problems.

    A grid of ``steps + 1`` points (endpoints included) locates the best
    cell; ``rounds - 1`` zoom passes regrid the bracket around it, and a
    final golden-section pass polishes to ``xtol``. The best point seen
    anywhere is returned, so an optimum on the boundary is reported exactly.

    Returns ``(x_best, f_best)`` arrays of shape ``(nprob,)``.
    """
    lo = np.array(lo, dtype=float, ndmin=1)
    hi = np.array(hi, dtype=float, ndmin=1)
    lo, hi = np.broadcast_arrays(lo, hi)
    t = np.linspace(0.0, 1.0, steps + 1)
    a, b = lo.copy(), hi.copy()
    best_x = lo.copy()
    best_f = np.full(lo.shape, -np.inf)
    rows = np.arange(lo.size)
    for _ in range(max(1, rounds)):
        x = a[:, None] + (b - a)[:, None] * t[None, :]
        v = _clean(f(x))
        i = np.argmax(v, axis=1)
        fi = v[rows, i]
        upd = fi > best_f
        best_x = np.where(upd, x[rows, i], best_x)
        best_f = np.where(upd, fi, best_f)
        step = (b - a) / steps
        a = np.maximum(lo, x[rows, i] - step)
        b = np.minimum(hi, x[rows, i] + step)
    xg, fg = golden_max(f, a, b, xtol)
    upd = fg > best_f
    return np.where(upd, xg, best_x), np.where(upd, fg, best_f)


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, v.size + 1)
    cond = u - (css - 1.0) / k > 0
    r = k[cond][-1]
    theta = (css[r - 1] - 1.0) / r
    return np.maximum(v - theta, 0.0)


def maximize_simplex(f, n: int, *, starts: int = 8, seed: int = 0, max_iter: int = 200,
                     tol: float = 1e-10, fd_step: float = 1e-6):
    """Projected gradient ascent of a scalar ``f(p)`` over the n-simplex.

    Finite-difference gradients, backtracking step size, ``starts`` restarts
    (uniform first, then Dirichlet draws from a fixed seed). Returns the best
    ``(p, f(p))``.
    """
    rng = np.random.default_rng(seed)
    inits = [np.full(n, 1.0 / n)] + [rng.dirichlet(np.ones(n)) for _ in range(starts - 1)]
    best_p, best_v = None, -np.inf
    for p in inits:
        v = f(p)
        step = 0.5
        for _ in range(max_iter):
            g = np.empty(n)
            for i in range(n):
                e = np.zeros(n)
                e[i] = fd_step
                g[i] = (f(project_simplex(p + e)) - f(project_simplex(p - e))) / (2 * fd_step)
            g -= g.mean()
            if np.linalg.norm(g) < tol:
                break
            improved = False
            while step > 1e-8:
                cand = project_simplex(p + step * g)
                cv = f(cand)
                if cv > v:
                    improved = True
                    break
                step /= 2
            if not improved or cv - v < tol:
                if improved:
                    p, v = cand, cv
                break
            p, v = cand, cv
            step = min(step * 2, 1.0)
        if v > best_v:
            best_p, best_v = p, v
    return best_p, best_v
