"""Batched first-order ascent for gauge-ratio maximization.

Everything that needs "maximize one norm over the unit ball of another"
funnels through here: support functions, section radii, and the inner loops
of the brute-force width searches.  The objective g_num(y)/g_den(y) is
0-homogeneous, so iterates live on the Euclidean unit sphere and all
restarts advance together as rows of one matrix.

Values returned are achieved values, hence certified lower bounds on the
true maxima; every caller uses them in the direction where that is safe.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize

from .linalg import as_generator

_EPS = 1e-300


def _normalize_rows(y: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(y, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return y / norms


def ratio_ascent(numerator, denominator, dim: int, restarts: int = 64,
                 iters: int = 300, seed=0, starts=None, polish: bool = True):
    """Maximize numerator.gauge / denominator.gauge over directions in R^dim.

    Returns ``(value, point)`` with the point scaled to denominator gauge 1.
    ``starts`` may carry extra initial directions (rows)."""
    rng = as_generator(seed)
    y = rng.standard_normal((max(int(restarts), 1), dim))
    if starts is not None and len(starts) > 0:
        y = np.vstack([np.atleast_2d(np.asarray(starts, dtype=float)), y])
    y = _normalize_rows(y)

    step = np.full(len(y), 0.3)
    best_val = np.full(len(y), -np.inf)
    best_y = y.copy()
    prev = np.full(len(y), -np.inf)
    for it in range(iters):
        gn, grad_n = numerator.gauge_grad_many(y)
        gd, grad_d = denominator.gauge_grad_many(y)
        ratio = gn / np.maximum(gd, _EPS)
        improved = ratio > best_val
        best_val[improved] = ratio[improved]
        best_y[improved] = y[improved]
        step[ratio < prev] *= 0.5
        prev = ratio
        grad = grad_n / np.maximum(gn, _EPS)[:, None] - grad_d / np.maximum(gd, _EPS)[:, None]
        grad -= np.sum(grad * y, axis=1, keepdims=True) * y
        decay = 1.0 / (1.0 + 3.0 * it / max(iters, 1))
        y = _normalize_rows(y + (step * decay)[:, None] * grad)

    order = np.argsort(best_val)[::-1]
    top_val = float(best_val[order[0]])
    top_y = best_y[order[0]]
    if polish:
        def neg_log_ratio(v):
            v = np.atleast_2d(v)
            gn, _ = numerator.gauge_grad_many(v)
            gd, _ = denominator.gauge_grad_many(v)
            if gn[0] <= 0 or gd[0] <= 0:
                return np.inf
            return -np.log(gn[0] / gd[0])

        for idx in order[: min(3, len(order))]:
            res = minimize(neg_log_ratio, best_y[idx], method="Nelder-Mead",
                           options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 400 * dim})
            if np.isfinite(res.fun) and -res.fun > np.log(max(top_val, _EPS)):
                top_val = float(np.exp(-res.fun))
                top_y = np.asarray(res.x, dtype=float)

    gd, _ = denominator.gauge_grad_many(np.atleast_2d(top_y))
    point = top_y / max(gd[0], _EPS)
    return top_val, point


def support_values(body, targets: np.ndarray, restarts: int = 6,
                   iters: int = 350, seed=0) -> np.ndarray:
    """Support function of ``body`` at each target row, by batched ascent.

    Maximizes <x, y> / gauge(y); the target direction itself is used as a
    smart start (exact whenever the body is the Euclidean ball).
    """
    x = np.atleast_2d(np.asarray(targets, dtype=float))
    n_samples, dim = x.shape
    r = max(int(restarts), 1)
    rng = as_generator(seed)

    x_rep = np.repeat(x, r, axis=0)
    y = rng.standard_normal((n_samples * r, dim))
    y[::r] = x_rep[::r]  # smart start on the first restart of each sample
    zero_rows = np.linalg.norm(y, axis=1) == 0
    y[zero_rows] = 1.0
    y = _normalize_rows(y)

    step = np.full(len(y), 0.3)
    best = np.zeros(len(y))
    prev = np.full(len(y), -np.inf)
    for it in range(iters):
        inner = np.sum(x_rep * y, axis=1)
        flip = inner < 0
        y[flip] = -y[flip]
        inner = np.abs(inner)
        g, grad = body.gauge_grad_many(y)
        val = inner / np.maximum(g, _EPS)
        np.maximum(best, val, out=best)
        step[val < prev] *= 0.5
        prev = val
        grad_log = x_rep / np.maximum(inner, _EPS)[:, None] - grad / np.maximum(g, _EPS)[:, None]
        grad_log -= np.sum(grad_log * y, axis=1, keepdims=True) * y
        decay = 1.0 / (1.0 + 3.0 * it / max(iters, 1))
        y = _normalize_rows(y + (step * decay)[:, None] * grad_log)

    return best.reshape(n_samples, r).max(axis=1)
