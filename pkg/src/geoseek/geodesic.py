"""Quadratic-approximation geodesic stepper for conformally flat metrics.

A scalar field phi turns R^D into a curved space through the metric
``g = exp(2*phi) * I``.  Geodesics of that metric bend toward regions of
higher phi, which makes tracing them a search heuristic.  For this metric
family the geodesic acceleration has a closed form, so stepping never
inverts a matrix: the position update is

    x' = x + v*dt + c*dt^2,

with unit tangent ``v`` and curvature coefficient

    c = 0.5 * (grad - 2*(v.grad)*v).

The quadratic model is only trusted while the linear term dominates; the
critical step size where the binding component's quadratic term catches
up bounds ``dt`` from above (half of it is used in practice).

``christoffel_oracle`` recomputes the acceleration the slow, general way
(finite differences of the metric plus explicit inversion) and exists to
cross-check the closed form in tests; it is not used by the search path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .objective import ObjectiveHandle

# Tangent updates below this displacement keep the previous direction.
MIN_DISPLACEMENT = 1e-14


class NonFiniteStepError(ArithmeticError):
    """A position update produced NaN/Inf; the caller decides recovery."""


class MetricDegeneracyError(ArithmeticError):
    """The conformal factor exp(2*phi) under- or overflowed."""


@dataclass(frozen=True)
class GeodesicState:
    """Position, unit tangent and 1-based step index of a traced geodesic."""

    x: np.ndarray
    v: np.ndarray
    t: int = 1


def _as_finite_vector(a, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or a.shape[0] < 1:
        raise ValueError(f"{name} must be a 1-D vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def curvature_term(v, grad) -> np.ndarray:
    """Quadratic coefficient of the geodesic step at a point with gradient ``grad``.

    ``v`` must be a unit vector.  The result satisfies the identity
    ``v . c == -0.5 * (v . grad)``, which is asserted.
    """
    v = _as_finite_vector(v, "v")
    grad = _as_finite_vector(grad, "grad")
    if v.shape != grad.shape:
        raise ValueError(f"dimension mismatch: v has {v.shape[0]}, grad has {grad.shape[0]}")
    nv = float(np.linalg.norm(v))
    if abs(nv - 1.0) > 1e-9:
        raise ValueError(f"v must be a unit vector (norm {nv!r})")
    vg = float(v @ grad)
    c = 0.5 * (grad - 2.0 * vg * v)
    assert abs(float(v @ c) + 0.5 * vg) <= 1e-12 * max(1.0, abs(vg))
    return c


def critical_step(v, c) -> float:
    """Step size at which the quadratic term matches the linear one.

    Minimum of ``|v_i / c_i|`` over components whose curvature exceeds a
    relative threshold; ``+inf`` when no component qualifies (flat case).
    """
    v = np.asarray(v, dtype=float)
    c = np.asarray(c, dtype=float)
    if v.shape != c.shape:
        raise ValueError(f"dimension mismatch: v has {v.shape}, c has {c.shape}")
    eps = 1e-12 * max(1.0, float(np.max(np.abs(v))))
    mask = np.abs(c) > eps
    if not np.any(mask):
        return float("inf")
    return float(np.min(np.abs(v[mask] / c[mask])))


def quadratic_step(x, v, c, dt: float) -> np.ndarray:
    """Advance ``x`` by ``v*dt + c*dt^2``; raises on non-finite results."""
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        out = x + np.asarray(v, dtype=float) * dt + np.asarray(c, dtype=float) * (dt * dt)
    if not np.all(np.isfinite(out)):
        raise NonFiniteStepError(f"non-finite step from dt={dt!r}")
    return out


def advance(
    state: GeodesicState,
    objective: ObjectiveHandle,
    dt_lb: float,
    flip_first: bool = False,
) -> GeodesicState:
    """One geodesic step with the adaptive size ``dt = max(tc/2, dt_lb)``.

    When the curvature vanishes in every component the critical step is
    infinite and ``dt_lb`` is used, so constant phi yields straight lines.
    On the very first step, if the lower bound binds and ``flip_first`` is
    set, the curvature sign is flipped (the quadratic term would otherwise
    push against the gradient, since the initial tangent is the gradient).
    The new tangent is the normalized realized displacement; displacements
    below ``MIN_DISPLACEMENT`` keep the previous tangent.
    """
    if not dt_lb > 0.0:
        raise ValueError(f"dt_lb must be positive, got {dt_lb!r}")
    grad = objective.gradient(state.x)
    c = curvature_term(state.v, grad)
    tc = critical_step(state.v, c)
    dt = max(0.5 * tc, dt_lb) if np.isfinite(tc) else dt_lb
    if state.t == 1 and flip_first and dt == dt_lb:
        c = -c
    x_new = quadratic_step(state.x, state.v, c, dt)
    disp = x_new - state.x
    norm = float(np.linalg.norm(disp))
    v_new = disp / norm if norm >= MIN_DISPLACEMENT else state.v
    return GeodesicState(x=x_new, v=v_new, t=state.t + 1)


def christoffel_oracle(objective: ObjectiveHandle, x, v, h: float = 1e-5) -> np.ndarray:
    """Geodesic acceleration from first principles, for validation only.

    Builds the connection coefficients of ``g = exp(2*phi) * I`` by central
    finite differences (spacing ``h``) with explicit numerical inversion of
    the metric, then contracts twice with ``v``.  For unit tangents the
    result equals ``2 * curvature_term(v, grad)`` up to discretization
    error.  O(D^3) work per call, small-D test use only.
    """
    if not h > 0.0:
        raise ValueError(f"h must be positive, got {h!r}")
    x = _as_finite_vector(x, "x")
    v = _as_finite_vector(v, "v")
    dim = x.shape[0]

    def metric(y: np.ndarray) -> np.ndarray:
        factor = np.exp(2.0 * objective.value(y))
        return factor * np.eye(dim)

    g0 = metric(x)
    if not np.all(np.isfinite(g0)) or g0[0, 0] == 0.0:
        raise MetricDegeneracyError(
            f"conformal factor degenerate at x={x!r} (exp(2*phi) = {g0[0, 0]!r})"
        )
    g_inv = np.linalg.inv(g0)

    dg = np.empty((dim, dim, dim))  # dg[k] = d g / d x_k
    for k in range(dim):
        step = np.zeros(dim)
        step[k] = h
        dg[k] = (metric(x + step) - metric(x - step)) / (2.0 * h)

    gamma = 0.5 * (
        np.einsum("im,kmj->ijk", g_inv, dg)
        + np.einsum("im,jmk->ijk", g_inv, dg)
        - np.einsum("im,mjk->ijk", g_inv, dg)
    )
    return -np.einsum("ijk,j,k->i", gamma, v, v)
