"""Minimum-norm point under linear equalities and box bounds.

Solves::

    minimize    0.5 * ||x||^2
    subject to  A x = b,  lo <= x <= hi

through its concave dual ``g(lam) = min_{lo<=x<=hi} 0.5||x||^2 - lam.(Ax - b)``,
whose inner minimizer is ``x(lam) = clip(A^T lam, lo, hi)``. The dual is
maximized by a semismooth Newton method: the generalized Hessian is
``-A D A^T`` with ``D`` the indicator of the free (unclipped) coordinates, so
each iteration is a primal-dual active-set update followed by a backtracking
line search on ``g``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass
class QpResult:
    x: np.ndarray
    dual: np.ndarray
    residual: float
    iterations: int
    converged: bool


def solve_box_least_norm(
    A_T: Callable[[np.ndarray], np.ndarray],
    A: Callable[[np.ndarray], np.ndarray],
    hessian: Callable[[np.ndarray], np.ndarray],
    b: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> QpResult:
    """Semismooth Newton on the dual of the box-constrained least-norm problem.

    The constraint operator is passed as callables so structured problems never
    materialize ``A``: ``A_T(lam)`` maps duals to primal space, ``A(x)`` maps back,
    and ``hessian(free)`` returns ``A diag(free) A^T`` for a boolean mask ``free``.
    """
    b = np.asarray(b, dtype=np.float64)
    lam = np.zeros_like(b)

    def primal(lam):
        return np.clip(A_T(lam), lo, hi)

    def dual_value(lam, x):
        return 0.5 * float(np.sum(x * x)) - float(np.dot(lam, A(x) - b))

    x = primal(lam)
    g = dual_value(lam, x)
    scale = max(1.0, float(np.max(np.abs(b))))
    for it in range(1, max_iter + 1):
        grad = b - A(x)
        res = float(np.max(np.abs(grad)))
        if res <= tol * scale:
            return QpResult(x, lam, res, it - 1, True)
        z = A_T(lam)
        free = (z > lo) & (z < hi)
        H = hessian(free)
        reg = 1e-12 * max(1.0, float(np.trace(H)) / len(b))
        try:
            step = np.linalg.solve(H + reg * np.eye(len(b)), grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(H, grad, rcond=None)[0]
        if not np.all(np.isfinite(step)):
            step = grad
        # Armijo backtracking on the (concave) dual
        t = 1.0
        slope = float(np.dot(grad, step))
        if slope <= 0:
            step, slope = grad, float(np.dot(grad, grad))
        while True:
            lam_new = lam + t * step
            x_new = primal(lam_new)
            g_new = dual_value(lam_new, x_new)
            if g_new >= g + 1e-4 * t * slope or t < 1e-12:
                break
            t *= 0.5
        if t < 1e-12 and g_new <= g:
            break
        lam, x, g = lam_new, x_new, g_new
    res = float(np.max(np.abs(b - A(x))))
    return QpResult(x, lam, res, max_iter, res <= tol * scale)
