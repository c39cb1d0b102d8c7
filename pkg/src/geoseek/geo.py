"""Single geodesic-trace optimization run (forward and backward branches).

One run traces the geodesic of the conformal metric from a start point in
both directions (initial tangent along +gradient, then along -gradient),
refines selected trace points with the local quasi-Newton maximizer, and
summarizes what the next run of a sequential driver needs: the best point
found, a jump direction toward a suspected neighboring maximum, a 0/1/2
locality indicator (how flat each branch's value profile is), and the mean
quasi-Newton displacement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geodesic import NonFiniteStepError, critical_step, curvature_term, quadratic_step
from .objective import ObjectiveHandle
from .quasinewton import QnSettings, maximize_local

_RESAMPLE_TRIES = 100
_TOL_FLOOR = 1e-8


@dataclass(frozen=True)
class GeoConfig:
    """Trace length, quasi-Newton cadence, step bound and search box."""

    steps: int
    t_qn: int
    use_qn: bool
    dt_lb: float
    lower: np.ndarray
    upper: np.ndarray
    tol_f: float = 0.05
    qn_settings: QnSettings = field(default_factory=QnSettings)

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.t_qn < 1:
            raise ValueError("t_qn must be >= 1")
        if not self.dt_lb > 0.0:
            raise ValueError("dt_lb must be positive")
        if not np.all(np.asarray(self.lower) < np.asarray(self.upper)):
            raise ValueError("box must satisfy lower < upper componentwise")


@dataclass(frozen=True)
class TraceRow:
    branch: str  # "forward" | "backward"
    t: int
    x: np.ndarray
    phi: float  # best of geodesic value and quasi-Newton value at this step
    dt: float


@dataclass(frozen=True)
class GeoResult:
    phi_star: float
    x_star: np.ndarray
    r_bar: float
    jump_unit: Optional[np.ndarray]
    k: int
    trace: list[TraceRow]
    value_calls: int
    gradient_calls: int


def resample_out_of_bounds(x, lower, upper, rng: np.random.Generator) -> np.ndarray:
    """x unchanged when inside [lower, upper]; otherwise a fresh uniform draw."""
    x = np.asarray(x, dtype=float)
    if np.all(x >= lower) and np.all(x <= upper):
        return x
    return rng.uniform(lower, upper)


def jump_direction(trace_positions, trace_values) -> np.ndarray:
    """Weighted mean minus plain mean of the trace positions.

    Weights are the min-shifted values, so adding a constant to every
    value changes nothing; a flat trace yields the exact zero vector.
    """
    xs = np.asarray(trace_positions, dtype=float)
    vals = np.asarray(trace_values, dtype=float)
    if xs.shape[0] == 0 or xs.shape[0] != vals.shape[0]:
        raise ValueError("positions and values must be nonempty and equally long")
    w = vals - vals.min()
    total = float(w.sum())
    if total <= 1e-300:
        return np.zeros(xs.shape[1])
    return (w / total) @ xs - xs.mean(axis=0)


def locality_indicator(forward_values, backward_values, tol_f: float) -> int:
    """0 = forward branch saw distinct maxima; 1 = forward flat; 2 = both flat.

    Flat means every value sits within ``tol_f`` (relative, floored) of the
    branch maximum; the upgrade to 2 also needs both branch maxima to agree
    within the same relative tolerance.
    """
    fwd = np.asarray(forward_values, dtype=float)
    if fwd.size == 0:
        raise ValueError("forward branch values must be nonempty")
    fmax = float(fwd.max())
    if np.any(np.abs(fmax - fwd) >= tol_f * max(abs(fmax), _TOL_FLOOR)):
        return 0
    bwd = np.asarray(backward_values, dtype=float)
    if bwd.size == 0:
        return 1
    bmax = float(bwd.max())
    band = tol_f * max(abs(bmax), _TOL_FLOOR)
    if abs(bmax - fmax) < band and np.all(np.abs(bmax - bwd) < band):
        return 2
    return 1


def _random_unit(rng: np.random.Generator, dim: int) -> np.ndarray:
    while True:
        u = rng.standard_normal(dim)
        n = float(np.linalg.norm(u))
        if n > 1e-12:
            return u / n


def _trace_branch(objective, config, x0, rng, branch, tangent_sign, flip_enabled):
    """Run one branch for ``config.steps`` steps; returns rows and summaries."""
    lower, upper = config.lower, config.upper
    x = np.asarray(x0, dtype=float).copy()
    prev_x = None
    prev_v = None
    resampled = False

    rows = []
    positions = []
    values = []
    qn_displacements = []
    best_phi = -np.inf
    best_x = x

    for t in range(1, config.steps + 1):
        phi_t = objective.value(x)
        grad = objective.gradient(x)
        if not (np.isfinite(phi_t) and np.all(np.isfinite(grad))):
            if t == 1:
                raise ValueError(f"objective non-finite at start point {x!r}")
            for _ in range(_RESAMPLE_TRIES):
                x = rng.uniform(lower, upper)
                phi_t = objective.value(x)
                grad = objective.gradient(x)
                if np.isfinite(phi_t) and np.all(np.isfinite(grad)):
                    break
            else:
                raise ValueError("objective non-finite everywhere sampled in the box")
            resampled = True

        if t == 1 or resampled:
            delta = tangent_sign * grad
        else:
            delta = x - prev_x
        norm = float(np.linalg.norm(delta))
        if norm < 1e-14:
            v = prev_v if prev_v is not None else _random_unit(rng, x.shape[0])
        else:
            v = delta / norm

        phi_star_t = phi_t
        if config.use_qn and t % config.t_qn == 0:
            qn = maximize_local(objective, x, config.qn_settings)
            qn_displacements.append(qn.displacement)
            if qn.phi_star > phi_star_t:
                phi_star_t = qn.phi_star
            if qn.phi_star > best_phi:
                best_phi, best_x = qn.phi_star, qn.x_star
        if phi_t > best_phi:
            best_phi, best_x = phi_t, x

        c = curvature_term(v, grad)
        tc = critical_step(v, c)
        dt = max(0.5 * tc, config.dt_lb) if np.isfinite(tc) else config.dt_lb
        if t == 1 and flip_enabled and dt == config.dt_lb:
            c = -c
        try:
            x_next = quadratic_step(x, v, c, dt)
        except NonFiniteStepError:
            x_next = None

        rows.append(TraceRow(branch=branch, t=t, x=x.copy(), phi=phi_star_t, dt=dt))
        positions.append(x.copy())
        values.append(phi_star_t)

        resampled = False
        if x_next is None or np.any(x_next < lower) or np.any(x_next > upper):
            x_next = rng.uniform(lower, upper)
            resampled = True
        prev_x, prev_v, x = x, v, x_next

    return rows, positions, values, qn_displacements, best_phi, best_x


def run_geo(
    objective: ObjectiveHandle,
    config: GeoConfig,
    x0,
    rng: np.random.Generator,
) -> GeoResult:
    """Trace forward and backward geodesic branches from ``x0``.

    The forward branch starts along +gradient with the first-step curvature
    flip active; the backward branch starts along -gradient without it.
    Points leaving the box (or producing non-finite values) are replaced by
    uniform draws, after which the tangent restarts from the local gradient.
    """
    x0 = np.asarray(x0, dtype=float)
    if np.any(x0 < config.lower) or np.any(x0 > config.upper):
        raise ValueError("x0 must lie inside the search box")
    v0, g0 = objective.counts()

    f_rows, f_pos, f_vals, f_disp, f_best, f_best_x = _trace_branch(
        objective, config, x0, rng, "forward", +1.0, flip_enabled=True
    )
    b_rows, b_pos, b_vals, b_disp, b_best, b_best_x = _trace_branch(
        objective, config, x0, rng, "backward", -1.0, flip_enabled=False
    )

    delta = 0.5 * (jump_direction(f_pos, f_vals) + jump_direction(b_pos, b_vals))
    norm = float(np.linalg.norm(delta))
    jump_unit = delta / norm if norm > 1e-250 else None

    displacements = f_disp + b_disp
    r_bar = float(np.mean(displacements)) if displacements else 0.0

    if f_best >= b_best:
        phi_star, x_star = f_best, f_best_x
    else:
        phi_star, x_star = b_best, b_best_x

    v1, g1 = objective.counts()
    return GeoResult(
        phi_star=phi_star,
        x_star=np.asarray(x_star, dtype=float).copy(),
        r_bar=r_bar,
        jump_unit=jump_unit,
        k=locality_indicator(f_vals, b_vals, config.tol_f),
        trace=f_rows + b_rows,
        value_calls=v1 - v0,
        gradient_calls=g1 - g0,
    )
