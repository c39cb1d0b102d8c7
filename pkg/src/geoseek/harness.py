"""Experiment runner: seeded trials, baselines, CSV/JSON/trace emission.

Each (function, seed, algorithm) trial gets its own RNG stream derived
from the seed base, the function name, the algorithm name and the seed,
so trials are reproducible and independent of execution order.  Baselines
(multistart quasi-Newton, uniform random search) run against the same
total evaluation budget the sequential geodesic search actually used on
that function and seed.
"""

from __future__ import annotations

import csv
import json
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from . import benchmarks
from .objective import ObjectiveHandle
from .quasinewton import QnSettings, maximize_local
from .sgeo import default_config, run_sgeo

ALGORITHMS = ("sgeo", "multistart_qn", "random_search")

CSV_COLUMNS = (
    "function,seed,algorithm,phi_found,success,value_calls,gradient_calls,"
    "wall_time_s,runs_executed"
)

_BASELINE_QN = QnSettings(max_iter=200, tol_f=1e-6, tol_x=1e-4)


@dataclass(frozen=True)
class TrialRecord:
    function: str
    seed: int
    algorithm: str
    phi_found: float
    success: bool
    value_calls: int
    gradient_calls: int
    wall_time_s: float
    runs_executed: int


@dataclass(frozen=True)
class ExperimentConfig:
    functions: list[str]
    n_seeds: int
    algorithms: list[str] = field(default_factory=lambda: ["sgeo"])
    seed_base: int = 0
    no_qn: bool = False
    no_jump: bool = False
    workers: int = 1
    out: Optional[str] = None
    fmt: str = "csv"

    def __post_init__(self):
        if self.n_seeds < 1:
            raise ValueError("n_seeds must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r}; choose from {ALGORITHMS}")
        if self.fmt not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, got {self.fmt!r}")


def success(phi_found: float, known_max: float) -> bool:
    """Within 5% of the known maximum; for a zero maximum, above -0.05."""
    if known_max != 0.0:
        return abs(phi_found - known_max) <= 0.05 * abs(known_max)
    return phi_found >= -0.05


def _trial_rng(seed_base: int, function: str, algorithm: str, seed: int):
    return np.random.default_rng(
        [
            seed_base & 0xFFFFFFFF,
            zlib.crc32(function.encode()),
            zlib.crc32(algorithm.encode()),
            seed,
        ]
    )


class _BudgetExhausted(Exception):
    pass


class _BudgetedObjective:
    """Counts every evaluation against a shared budget and tracks the best
    value seen (including line-search probes)."""

    def __init__(self, spec: benchmarks.BenchmarkSpec, budget: int):
        self.spec = spec
        self.budget = budget
        self.used = 0
        self.best_phi = -np.inf
        self.best_x = None

    def value(self, x):
        if self.used >= self.budget:
            raise _BudgetExhausted
        self.used += 1
        v = benchmarks.evaluate(self.spec, x)
        if v > self.best_phi:
            self.best_phi, self.best_x = v, np.asarray(x, dtype=float).copy()
        return v

    def gradient(self, x):
        if self.used >= self.budget:
            raise _BudgetExhausted
        self.used += 1
        return benchmarks.gradient(self.spec, x)


def _run_sgeo_trial(spec, rng, no_qn, no_jump):
    cfg = default_config(spec.lower, spec.upper, spec.dimension)
    if no_qn:
        # ablation: no quasi-Newton, longer traces (200 steps per run)
        cfg = replace(cfg, use_qn=False, n_total=cfg.n_runs * 200)
    obj = benchmarks.make_objective(spec)
    res = run_sgeo(obj, spec.lower, spec.upper, cfg, rng, no_jump=no_jump)
    return res.phi_star, obj.value_calls, obj.gradient_calls, res.runs_executed


def _run_multistart_trial(spec, rng, budget):
    wrapped = _BudgetedObjective(spec, budget)
    obj = ObjectiveHandle(wrapped.value, wrapped.gradient, spec.dimension)
    starts = 0
    try:
        while True:
            x0 = rng.uniform(spec.lower, spec.upper)
            starts += 1
            maximize_local(obj, x0, _BASELINE_QN)
    except _BudgetExhausted:
        pass
    return float(wrapped.best_phi), obj.value_calls, obj.gradient_calls, starts


def _run_random_search_trial(spec, rng, budget):
    wrapped = _BudgetedObjective(spec, budget)
    obj = ObjectiveHandle(wrapped.value, wrapped.gradient, spec.dimension)
    samples = 0
    try:
        while True:
            obj.value(rng.uniform(spec.lower, spec.upper))
            samples += 1
    except _BudgetExhausted:
        pass
    return float(wrapped.best_phi), obj.value_calls, obj.gradient_calls, samples


def _run_group(function: str, seed: int, algorithms, seed_base, no_qn, no_jump):
    """All requested algorithms for one (function, seed), sgeo first so the
    baselines inherit its realized evaluation budget."""
    records = []
    budget = None

    def one(algorithm):
        nonlocal budget
        spec = benchmarks.get(function)
        rng = _trial_rng(seed_base, function, algorithm, seed)
        t0 = time.perf_counter()
        try:
            if algorithm == "sgeo":
                phi, vc, gc, runs = _run_sgeo_trial(spec, rng, no_qn, no_jump)
                budget = vc + gc
            else:
                if budget is None:
                    probe_spec = benchmarks.get(function)
                    probe_rng = _trial_rng(seed_base, function, "sgeo", seed)
                    _, pv, pg, _ = _run_sgeo_trial(probe_spec, probe_rng, no_qn, no_jump)
                    budget = pv + pg
                run = {"multistart_qn": _run_multistart_trial,
                       "random_search": _run_random_search_trial}[algorithm]
                phi, vc, gc, runs = run(spec, rng, budget)
            ok = success(phi, spec.known_max)
        except Exception:
            phi, vc, gc, runs, ok = float("nan"), 0, 0, 0, False
        wall = time.perf_counter() - t0
        return TrialRecord(function, seed, algorithm, phi, ok, vc, gc, wall, runs)

    ordered = [a for a in ("sgeo",) if a in algorithms]
    ordered += [a for a in algorithms if a != "sgeo"]
    for algorithm in ordered:
        records.append(one(algorithm))
    return records


def run_experiment(config: ExperimentConfig) -> list[TrialRecord]:
    """Run every (function, seed, algorithm) trial; failures never abort.

    Records come back sorted by (function, seed, algorithm) regardless of
    worker scheduling.
    """
    for name in config.functions:
        benchmarks.get(name)  # raises KeyError on unknown names

    tasks = [(fn, seed) for fn in config.functions for seed in range(config.n_seeds)]
    args = [
        (fn, seed, tuple(config.algorithms), config.seed_base, config.no_qn, config.no_jump)
        for fn, seed in tasks
    ]
    records: list[TrialRecord] = []
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            for group in pool.map(_run_group_star, args):
                records.extend(group)
    else:
        for a in args:
            records.extend(_run_group(*a))
    records.sort(key=lambda r: (r.function, r.seed, r.algorithm))
    return records


def _run_group_star(a):
    return _run_group(*a)


# ---------------------------------------------------------------------------
# emission

def _record_row(r: TrialRecord) -> list[str]:
    return [
        r.function,
        str(r.seed),
        r.algorithm,
        repr(r.phi_found),
        "true" if r.success else "false",
        str(r.value_calls),
        str(r.gradient_calls),
        f"{r.wall_time_s:.6f}",
        str(r.runs_executed),
    ]


def emit_results(records, path, fmt: str = "csv",
                 config: Optional[ExperimentConfig] = None) -> None:
    """Write records as CSV (fixed column set) or JSON (with config echo)."""
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS.split(","))
            for r in records:
                writer.writerow(_record_row(r))
    elif fmt == "json":
        payload = {
            "config": asdict(config) if config is not None else None,
            "records": [asdict(r) for r in records],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    else:
        raise ValueError(f"format must be csv or json, got {fmt!r}")


def load_records(path, fmt: str = "csv") -> list[TrialRecord]:
    """Read back what emit_results wrote (round-trip helper)."""
    records = []
    if fmt == "csv":
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                records.append(
                    TrialRecord(
                        function=row["function"],
                        seed=int(row["seed"]),
                        algorithm=row["algorithm"],
                        phi_found=float(row["phi_found"]),
                        success=row["success"] == "true",
                        value_calls=int(row["value_calls"]),
                        gradient_calls=int(row["gradient_calls"]),
                        wall_time_s=float(row["wall_time_s"]),
                        runs_executed=int(row["runs_executed"]),
                    )
                )
    elif fmt == "json":
        with open(path) as fh:
            payload = json.load(fh)
        records = [TrialRecord(**r) for r in payload["records"]]
    else:
        raise ValueError(f"format must be csv or json, got {fmt!r}")
    return records


def emit_trace(trace_rows, path) -> None:
    """Write trace rows as CSV: branch,t,x_1..x_D,phi,dt."""
    rows = list(trace_rows)
    if not rows:
        raise ValueError("cannot emit an empty trace")
    dim = rows[0].x.shape[0]
    header = ["branch", "t"] + [f"x_{i + 1}" for i in range(dim)] + ["phi", "dt"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for r in rows:
            writer.writerow([r.branch, str(r.t)] + [repr(float(c)) for c in r.x]
                            + [repr(r.phi), repr(r.dt)])


def failure_counts(records) -> dict[tuple[str, str], int]:
    """Failures per (function, algorithm)."""
    out: dict[tuple[str, str], int] = {}
    for r in records:
        key = (r.function, r.algorithm)
        out.setdefault(key, 0)
        if not r.success:
            out[key] += 1
    return out
