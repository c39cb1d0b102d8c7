"""Sequential driver: annealed geodesic runs, jumps, and early stopping.

Runs the geodesic tracer repeatedly with a geometrically shrinking lower
bound on the step size.  Between runs the start point jumps along the
trace-derived direction (or reflects across the box midpoint when both
branches were flat).  High-dimensional objectives whose quasi-Newton
refinements barely move in the first two runs are treated as oscillatory:
the schedule switches to many short runs without quasi-Newton and starts
over.  The driver stops early once enough runs agree on the best value.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geo import GeoConfig, TraceRow, resample_out_of_bounds, run_geo
from .objective import ObjectiveHandle

_TOL_FLOOR = 1e-8

# Schedule used once an objective is flagged oscillatory: many short runs,
# slow annealing, no quasi-Newton.
OSCILLATORY_SCHEDULE = {"n_runs": 400, "alpha": 0.98, "n_total": 4000, "use_qn": False}


@dataclass(frozen=True)
class SgeoConfig:
    """Driver schedule: run count, anneal factor, step budget, QN cadence."""

    n_runs: int
    alpha: float
    n_total: int
    dt_lb0: float
    t_qn: int
    use_qn: bool
    tol_f: float = 0.05

    def __post_init__(self):
        if self.n_runs < 1:
            raise ValueError("n_runs must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.n_total < self.n_runs:
            raise ValueError("n_total must be >= n_runs")
        if not self.dt_lb0 > 0.0:
            raise ValueError("dt_lb0 must be positive")

    @property
    def steps_per_run(self) -> int:
        return self.n_total // self.n_runs


@dataclass(frozen=True)
class HistoryEntry:
    phi_star: float
    x_star: np.ndarray
    k: int
    r_bar: float


@dataclass(frozen=True)
class RunLogEntry:
    n: int
    dt_lb: float
    k: int
    phi_star: float
    r_bar: float
    jump_kind: str  # "local" | "far" | "reflect" | "uniform" | "restart" | "stop"
    oscillation_switch: bool
    phase: int


@dataclass(frozen=True)
class SgeoResult:
    phi_star: float
    x_star: np.ndarray
    history: list[HistoryEntry]
    runs_executed: int  # runs under the final parameter set
    oscillatory: bool
    stopped_early: bool
    value_calls: int
    gradient_calls: int
    log: list[RunLogEntry]
    traces: Optional[list[TraceRow]] = None


def default_config(lower, upper, dim: int) -> SgeoConfig:
    """Standard schedule for a box: 20 runs over 500 steps, alpha 0.7,
    initial step lower bound ``min(upper-lower) * sqrt(dim) / 100``."""
    lower, upper = _as_box(lower, upper, dim)
    lam = float(np.min(upper - lower))
    if lam <= 0.0:
        raise ValueError("box must satisfy lower < upper componentwise")
    return SgeoConfig(
        n_runs=20,
        alpha=0.7,
        n_total=500,
        dt_lb0=lam * math.sqrt(dim) / 100.0,
        t_qn=10,
        use_qn=True,
        tol_f=0.05,
    )


def stopping_threshold(dim: int) -> int:
    """How many tolerance-equal maxima justify stopping, by dimension."""
    if dim < 10:
        return 5
    if dim < 20:
        return 10
    if dim <= 50:
        return 20
    warnings.warn(f"stopping threshold undefined for dimension {dim} > 50; using 20")
    return 20


def oscillation_check(r_bar: float, dim: int, n: int, use_qn: bool, lam: float) -> bool:
    """Oscillatory flag: tiny quasi-Newton moves early on, in high dimension."""
    return dim > 10 and r_bar < 0.1 * lam * math.sqrt(dim) and n <= 2 and use_qn


def next_start(k, x_star, x0_prev, jump_unit, n, alpha, lam, lower, upper,
               rng: np.random.Generator) -> np.ndarray:
    """Start point for run n+1, chosen by the locality indicator k.

    k=0: short jump ``alpha^n * lam`` along the jump direction from the
    best point; k=1 (forward branch trapped): fixed longer jump
    ``alpha * lam``; k=2 (both trapped): reflect the previous start across
    the box midpoint.  Points leaving the box are resampled uniformly.
    """
    x_star = np.asarray(x_star, dtype=float)
    j = np.zeros_like(x_star) if jump_unit is None else np.asarray(jump_unit, dtype=float)
    if k == 0:
        candidate = x_star + (alpha ** n * lam) * j
    elif k == 1:
        candidate = x_star + (alpha * lam) * j
    elif k == 2:
        mid = 0.5 * (np.asarray(lower, dtype=float) + np.asarray(upper, dtype=float))
        candidate = mid + (alpha ** n * lam) * (mid - np.asarray(x0_prev, dtype=float))
    else:
        raise ValueError(f"locality indicator must be 0, 1 or 2, got {k!r}")
    return resample_out_of_bounds(candidate, lower, upper, rng)


def _as_box(lower, upper, dim):
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if lower.ndim == 0:
        lower = np.full(dim, float(lower))
    if upper.ndim == 0:
        upper = np.full(dim, float(upper))
    if lower.shape != (dim,) or upper.shape != (dim,):
        raise ValueError("bounds do not match the stated dimension")
    return lower, upper


def run_sgeo(
    objective: ObjectiveHandle,
    lower,
    upper,
    config: SgeoConfig,
    rng: np.random.Generator,
    no_jump: bool = False,
    collect_traces: bool = False,
) -> SgeoResult:
    """Full sequential search over the box [lower, upper].

    ``no_jump`` replaces every between-run jump with a fresh uniform start
    (ablation support).  ``collect_traces`` keeps each run's trace rows for
    export.  Run ``n`` uses the step lower bound ``alpha^n * dt_lb0``; the
    oscillation switch (at most once) replaces the schedule, resets the
    anneal, and restarts the loop from a fresh uniform start while keeping
    the running best.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    dim = lower.shape[0]
    lam = float(np.min(upper - lower))
    n_th = stopping_threshold(dim)
    v0, g0 = objective.counts()

    n_runs, alpha, n_total, use_qn = config.n_runs, config.alpha, config.n_total, config.use_qn
    dt_lb0 = config.dt_lb0
    steps = n_total // n_runs

    x0 = rng.uniform(lower, upper)
    best_phi = -np.inf
    best_x = x0
    history: list[HistoryEntry] = []
    log: list[RunLogEntry] = []
    traces: list[TraceRow] = []
    phase_values: list[float] = []
    phase = 1
    switched = False
    oscillatory = False
    stopped_early = False
    runs_in_phase = 0

    n = 1
    while n <= n_runs:
        dt_lb = alpha ** n * dt_lb0
        geo_config = GeoConfig(
            steps=steps,
            t_qn=config.t_qn,
            use_qn=use_qn,
            dt_lb=dt_lb,
            lower=lower,
            upper=upper,
            tol_f=config.tol_f,
        )
        geo = run_geo(objective, geo_config, x0, rng)
        runs_in_phase += 1
        history.append(HistoryEntry(geo.phi_star, geo.x_star, geo.k, geo.r_bar))
        if collect_traces:
            traces.extend(geo.trace)
        if geo.phi_star > best_phi:
            best_phi, best_x = geo.phi_star, geo.x_star

        if not switched and oscillation_check(geo.r_bar, dim, n, use_qn, lam):
            log.append(RunLogEntry(n, dt_lb, geo.k, geo.phi_star, geo.r_bar,
                                   "restart", True, phase))
            switched = True
            oscillatory = True
            n_runs = OSCILLATORY_SCHEDULE["n_runs"]
            alpha = OSCILLATORY_SCHEDULE["alpha"]
            n_total = OSCILLATORY_SCHEDULE["n_total"]
            use_qn = OSCILLATORY_SCHEDULE["use_qn"]
            steps = n_total // n_runs
            dt_lb0 = lam * math.sqrt(dim) / 100.0
            phase = 2
            phase_values = []
            runs_in_phase = 0
            x0 = rng.uniform(lower, upper)
            n = 1
            continue

        if no_jump:
            x0 = rng.uniform(lower, upper)
            jump_kind = "uniform"
        else:
            x0 = next_start(geo.k, geo.x_star, x0, geo.jump_unit, n, alpha, lam,
                            lower, upper, rng)
            jump_kind = ("local", "far", "reflect")[geo.k]

        phase_values.append(geo.phi_star)
        band = config.tol_f * max(abs(best_phi), _TOL_FLOOR)
        n_star = sum(1 for p in phase_values if abs(best_phi - p) < band)
        done = n_star >= n_th
        log.append(RunLogEntry(n, dt_lb, geo.k, geo.phi_star, geo.r_bar,
                               "stop" if done else jump_kind, False, phase))
        if done:
            stopped_early = True
            break
        n += 1

    v1, g1 = objective.counts()
    return SgeoResult(
        phi_star=best_phi,
        x_star=np.asarray(best_x, dtype=float).copy(),
        history=history,
        runs_executed=runs_in_phase,
        oscillatory=oscillatory,
        stopped_early=stopped_early,
        value_calls=v1 - v0,
        gradient_calls=g1 - g0,
        log=log,
        traces=traces if collect_traces else None,
    )
