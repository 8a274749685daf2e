"""Small shared numerical kernels: FD Jacobians and a damped Newton iteration."""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceError


def fd_jacobian(func, x: np.ndarray, rel_step: float = 1e-6,
                min_step: float = 1e-6) -> np.ndarray:
    """Central finite-difference Jacobian of ``func`` at ``x``.

    Step per component: max(min_step, rel_step * |x_j|); truncation error O(h^2).
    """
    x = np.asarray(x, float)
    n = x.size
    f0 = np.asarray(func(x), float)
    J = np.empty((f0.size, n))
    for j in range(n):
        h = max(min_step, rel_step * abs(x[j]))
        xp = x.copy()
        xm = x.copy()
        xp[j] += h
        xm[j] -= h
        J[:, j] = (np.asarray(func(xp)) - np.asarray(func(xm))) / (2.0 * h)
    return J


def damped_newton(func, x0: np.ndarray, *, tol: float = 1e-9,
                  max_iter: int = 100, project_nonnegative: bool = False,
                  scale: np.ndarray | None = None, jac=None,
                  fd_rel_step: float = 1e-6, fd_min_step: float = 1e-6):
    """Newton iteration with backtracking damping on the scaled residual norm.

    Returns (x, residual, n_iter).  ``scale`` (defaults to max(1, |x|) per
    component, refreshed each step) divides the residual before the max-norm is
    taken.  Raises ConvergenceError when the target is not reached.
    """
    x = np.asarray(x0, float).copy()
    if project_nonnegative:
        np.maximum(x, 0.0, out=x)

    def norm(f, xs):
        s = scale if scale is not None else np.maximum(1.0, np.abs(xs))
        return float(np.max(np.abs(f) / s))

    f = np.asarray(func(x), float)
    best = norm(f, x)
    for it in range(max_iter):
        if best <= tol:
            return x, best, it
        J = jac(x) if jac is not None else fd_jacobian(
            func, x, rel_step=fd_rel_step, min_step=fd_min_step)
        try:
            step = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError:
            step, *_ = np.linalg.lstsq(J, -f, rcond=None)
        lam = 1.0
        improved = False
        while lam >= 1e-10:
            x_try = x + lam * step
            if project_nonnegative:
                x_try = np.maximum(x_try, 0.0)
            f_try = np.asarray(func(x_try), float)
            n_try = norm(f_try, x_try)
            if n_try < best:
                x, f, best = x_try, f_try, n_try
                improved = True
                break
            lam *= 0.5
        if not improved:
            break
    if best <= tol:
        return x, best, max_iter
    raise ConvergenceError(
        f"Newton stalled at scaled residual {best:.3e} (target {tol:.1e})",
        last_iterate=x, residual=best)
