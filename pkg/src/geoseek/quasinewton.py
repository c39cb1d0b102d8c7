"""Self-contained BFGS local maximizer with backtracking line search."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .objective import ObjectiveHandle

_ARMIJO = 1e-4
_BACKTRACK = 0.5
_ALPHA_MIN = 1e-12
_CURVATURE_EPS = 1e-10


@dataclass(frozen=True)
class QnSettings:
    """Iteration cap and stopping tolerances for the local maximizer."""

    max_iter: int = 200
    tol_f: float = 0.05
    tol_x: float = 0.01

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not (self.tol_f > 0.0 and self.tol_x > 0.0):
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class QnResult:
    x_star: np.ndarray
    phi_star: float
    iterations: int
    converged: bool
    displacement: float


def maximize_local(
    objective: ObjectiveHandle,
    x0,
    settings: QnSettings = QnSettings(),
) -> QnResult:
    """Maximize phi from ``x0`` by BFGS (internally minimizing -phi).

    Accepted iterates never decrease phi (Armijo backtracking from unit
    step).  Converged means the relative change ``|dphi| < tol_f *
    max(1, |phi|)`` or the accepted step fell below ``tol_x`` before
    ``max_iter`` iterations; a failed line search returns the best
    iterate so far with ``converged=False``.  The inverse-Hessian
    estimate starts at the identity and is reset there whenever the
    curvature condition degenerates.
    """
    x = np.asarray(x0, dtype=float).copy()
    if not np.all(np.isfinite(x)):
        raise ValueError("x0 contains non-finite entries")
    x_init = x.copy()
    dim = x.shape[0]

    f = -objective.value(x)  # minimize f = -phi
    g = -objective.gradient(x)
    h_inv = np.eye(dim)
    eye = np.eye(dim)

    iterations = 0
    converged = False
    for it in range(settings.max_iter):
        p = -h_inv @ g
        descent = float(g @ p)
        if descent >= 0.0:  # lost positive definiteness; restart from steepest
            h_inv = np.eye(dim)
            p = -g
            descent = float(g @ p)
        p_norm = float(np.linalg.norm(p))
        if p_norm < settings.tol_x or descent == 0.0:
            converged = True
            break

        # unit trial step except the very first iteration, whose raw
        # steepest-ascent direction can be arbitrarily long: scale it to
        # roughly unit length (standard initial-step guess)
        alpha = 1.0 if it > 0 else min(1.0, 1.0 / p_norm)
        f_new = None
        while alpha >= _ALPHA_MIN:
            f_try = -objective.value(x + alpha * p)
            if f_try <= f + _ARMIJO * alpha * descent:
                f_new = f_try
                break
            alpha *= _BACKTRACK
        if f_new is None:
            break  # line-search failure

        s = alpha * p
        x_new = x + s
        g_new = -objective.gradient(x_new)
        iterations += 1

        step = float(np.linalg.norm(s))
        df = abs(f_new - f)
        x, g_prev, f = x_new, g, f_new
        y = g_new - g_prev
        g = g_new

        if step < settings.tol_x or df < settings.tol_f * max(1.0, abs(f)):
            converged = True
            break

        sy = float(s @ y)
        if sy <= _CURVATURE_EPS * float(np.linalg.norm(s)) * float(np.linalg.norm(y)):
            h_inv = np.eye(dim)
        else:
            rho = 1.0 / sy
            left = eye - rho * np.outer(s, y)
            h_inv = left @ h_inv @ left.T + rho * np.outer(s, s)

    return QnResult(
        x_star=x,
        phi_star=-f,
        iterations=iterations,
        converged=converged,
        displacement=float(np.linalg.norm(x - x_init)),
    )
