"""Acceptance suite: one test per release criterion, each printing a verdict.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the PASS/FAIL line
per criterion.  Criteria and tolerances are fixed here, not calibrated.
"""

import dataclasses
import time

import numpy as np
import pytest

from geoseek import (
    ExperimentConfig,
    GeodesicState,
    ObjectiveHandle,
    advance,
    christoffel_oracle,
    critical_step,
    curvature_term,
    default_config,
    fd_gradient,
    get,
    gradient,
    quadratic_step,
    run_experiment,
    run_sgeo,
    stopping_threshold,
    success,
    suite,
)
from geoseek.harness import failure_counts


def _report(num, label, ok, detail=""):
    verdict = "PASS" if ok else "FAIL"
    print(f"[{verdict}] criterion {num}: {label}" + (f" ({detail})" if detail else ""))
    assert ok, f"criterion {num}: {label} ({detail})"


def _random_smooth_objective(rng, dim):
    a = rng.uniform(-1.0, 1.0, dim)
    b = rng.uniform(-1.0, 1.0, dim)
    q = rng.uniform(-0.5, 0.5, (dim, dim))
    q = 0.5 * (q + q.T)

    def value(x):
        return float(a @ np.sin(x + b) + 0.5 * x @ q @ x)

    def grad(x):
        return a * np.cos(x + b) + q @ x

    return ObjectiveHandle(value, grad, dim)


def test_criterion_1_christoffel_oracle_equivalence():
    rng = np.random.default_rng(1001)
    t0 = time.perf_counter()
    worst = 0.0
    cases = 0
    for dim in (2, 3, 5):
        for _ in range(34 if dim == 2 else 33):
            obj = _random_smooth_objective(rng, dim)
            x = rng.uniform(-1.5, 1.5, dim)
            v = rng.standard_normal(dim)
            v /= np.linalg.norm(v)
            oracle = christoffel_oracle(obj, x, v, h=1e-5)
            closed = 2.0 * curvature_term(v, obj.gradient(x))
            rel = np.linalg.norm(oracle - closed) / (1.0 + np.linalg.norm(oracle))
            worst = max(worst, rel)
            cases += 1
    elapsed = time.perf_counter() - t0
    ok = cases == 100 and worst <= 1e-4 and elapsed < 5.0
    _report(1, "Christoffel oracle equivalence",
            ok, f"{cases} cases, worst rel dev {worst:.2e}, {elapsed:.2f}s")


def test_criterion_2_flat_space_geodesic():
    obj = ObjectiveHandle(lambda x: 2.5, lambda x: np.zeros_like(x), 2)
    rng = np.random.default_rng(1002)
    worst = 0.0
    for _ in range(5):
        v0 = rng.standard_normal(2)
        v0 /= np.linalg.norm(v0)
        state = GeodesicState(np.zeros(2), v0, t=1)
        for _ in range(100):
            state = advance(state, obj, dt_lb=0.05, flip_first=True)
            cross = abs(state.x[0] * v0[1] - state.x[1] * v0[0])
            worst = max(worst, cross / np.linalg.norm(state.x))
    _report(2, "flat-space geodesic stays collinear",
            worst <= 1e-10, f"max deviation {worst:.2e}")


def test_criterion_3_binding_component_step_law():
    rng = np.random.default_rng(1003)
    checked = 0
    worst = 0.0
    while checked < 1000:
        dim = int(rng.integers(2, 7))
        v = rng.standard_normal(dim)
        v /= np.linalg.norm(v)
        c = rng.uniform(-2.0, 2.0, dim)
        tc = critical_step(v, c)
        if not np.isfinite(tc):
            continue
        with np.errstate(divide="ignore"):
            ratios = np.abs(np.where(np.abs(c) > 1e-12, v / np.where(c == 0.0, 1.0, c), np.inf))
        i = int(np.argmin(ratios))
        if v[i] * c[i] <= 0.0:
            c[i] = -c[i]
        x = rng.uniform(-1.0, 1.0, dim)
        out = quadratic_step(x, v, c, tc / 2.0)
        worst = max(worst, abs(abs(out[i] - x[i]) - 0.75 * abs(v[i]) * tc))
        checked += 1
    _report(3, "binding-component displacement law (3/4 |v_i| t_C)",
            worst <= 1e-12, f"1000 checks, worst deviation {worst:.2e}")


def test_criterion_4_gradient_suite():
    rng = np.random.default_rng(1004)
    worst = ("", 0.0)
    for spec in suite():
        margin = 1e-4 * (spec.upper - spec.lower)
        for _ in range(50):
            x = rng.uniform(spec.lower + margin, spec.upper - margin)
            fd = fd_gradient(spec, x)
            err = np.linalg.norm(gradient(spec, x) - fd) / (1.0 + np.linalg.norm(fd))
            if err > worst[1]:
                worst = (spec.name, err)
    _report(4, "analytic vs central-difference gradients over the suite",
            worst[1] <= 1e-5, f"worst {worst[0]} rel err {worst[1]:.2e}")


def test_criterion_5_attractor_property():
    def alignment(v, g):
        ng = np.linalg.norm(g)
        if ng < 1e-30:
            return 0.0
        cos = float(v @ g) / ng
        sin = np.sqrt(max(0.0, 1.0 - min(1.0, cos * cos)))
        return min(abs(cos), sin)

    obj = ObjectiveHandle(lambda x: -0.5 * float(x @ x), lambda x: -x, 2)
    rng = np.random.default_rng(1005)
    worst = 0.0
    for _ in range(20):
        x0 = rng.uniform(-2.0, 2.0, 2)
        while np.linalg.norm(x0) < 0.3:
            x0 = rng.uniform(-2.0, 2.0, 2)
        v0 = rng.standard_normal(2)
        v0 /= np.linalg.norm(v0)
        state = GeodesicState(x0, v0, t=1)
        best = np.inf
        for _ in range(200):
            state = advance(state, obj, dt_lb=0.02, flip_first=False)
            best = min(best, alignment(state.v, -state.x))
        worst = max(worst, best)
    _report(5, "tangent attracted to gradient/level-curve direction on the bowl",
            worst <= 0.05, f"20 starts, worst angular metric {worst:.3f}")


def test_criterion_6_sgeo_end_to_end():
    functions = ["camel", "branin", "log-goldstein-price", "two-bump"]
    t0 = time.perf_counter()
    records = run_experiment(ExperimentConfig(functions=functions, n_seeds=50,
                                              algorithms=["sgeo"]))
    elapsed = time.perf_counter() - t0
    counts = failure_counts(records)
    per_fn = {fn: 50 - counts[(fn, "sgeo")] for fn in functions}
    ok = all(v >= 45 for v in per_fn.values()) and elapsed < 300.0
    _report(6, "sequential search succeeds on the smooth multimodal set",
            ok, f"successes {per_fn}, {elapsed:.0f}s")


def test_criterion_7_ablation_direction():
    base = dict(n_seeds=50, algorithms=["sgeo"])
    full_tb = failure_counts(run_experiment(
        ExperimentConfig(functions=["two-bump"], **base)))[("two-bump", "sgeo")]
    nojump_tb = failure_counts(run_experiment(
        ExperimentConfig(functions=["two-bump"], no_jump=True, **base)))[("two-bump", "sgeo")]
    full_st = failure_counts(run_experiment(
        ExperimentConfig(functions=["styblinski-tang-10"], **base)))[("styblinski-tang-10", "sgeo")]
    noqn_st = failure_counts(run_experiment(
        ExperimentConfig(functions=["styblinski-tang-10"], no_qn=True, **base)))[("styblinski-tang-10", "sgeo")]
    ok = nojump_tb >= full_tb and noqn_st >= full_st
    _report(7, "ablations never beat the full algorithm (paired seeds)",
            ok, f"two-bump {full_tb} vs no-jump {nojump_tb}; "
                f"styblinski-tang-10 {full_st} vs no-qn {noqn_st}")


def test_criterion_8_stopping_rule():
    a = np.array([0.3, -0.2])
    lower, upper = np.full(2, -5.0), np.full(2, 5.0)
    cfg = default_config(lower, upper, 2)
    limit = stopping_threshold(2) + 2
    runs = []
    ok = True
    for seed in range(20):
        obj = ObjectiveHandle(lambda x: -0.5 * float((x - a) @ (x - a)),
                              lambda x: -(x - a), 2)
        res = run_sgeo(obj, lower, upper, cfg, np.random.default_rng([1008, seed]))
        runs.append(res.runs_executed)
        ok = ok and res.stopped_early and res.runs_executed <= limit
    _report(8, "early stop on the concave quadratic",
            ok, f"runs per seed min {min(runs)} max {max(runs)} (limit {limit})")


def test_criterion_9_oscillation_switch():
    spec = get("rastrigin-12")
    cfg = default_config(spec.lower, spec.upper, 12)
    fired = 0
    for seed in range(50):
        obj = ObjectiveHandle(spec.value_fn, spec.grad_fn, 12)
        res = run_sgeo(obj, spec.lower, spec.upper, cfg,
                       np.random.default_rng([1009, seed]))
        if any(e.oscillation_switch and e.n <= 2 for e in res.log):
            fired += 1
    _report(9, "oscillation switch fires within the first two runs on rastrigin-12",
            fired >= 40, f"{fired}/50 seeds")


def test_criterion_10_baseline_comparison():
    functions = ["camel", "branin", "rastrigin-2", "two-bump"]
    records = run_experiment(ExperimentConfig(functions=functions, n_seeds=50,
                                              algorithms=["sgeo", "multistart_qn"]))
    counts = failure_counts(records)
    sgeo_failures = sum(counts[(fn, "sgeo")] for fn in functions)
    qn_failures = sum(counts[(fn, "multistart_qn")] for fn in functions)
    per_fn = ", ".join(
        f"{fn} {counts[(fn, 'sgeo')]}/{counts[(fn, 'multistart_qn')]}" for fn in functions
    )
    _report(10, "sequential search is no worse than budget-matched multistart",
            sgeo_failures <= qn_failures,
            f"failures sgeo {sgeo_failures} vs multistart {qn_failures}; per-fn {per_fn}")


def test_criterion_11_determinism():
    cfg = ExperimentConfig(functions=["two-bump", "camel"], n_seeds=3,
                           algorithms=["sgeo", "random_search"])
    first = run_experiment(cfg)
    second = run_experiment(cfg)
    ok = len(first) == len(second)
    for a, b in zip(first, second):
        ok = ok and a.phi_found == b.phi_found
        ok = ok and dataclasses.replace(a, wall_time_s=0.0) == dataclasses.replace(
            b, wall_time_s=0.0
        )
    _report(11, "identical seed and config reproduce identical records",
            ok, f"{len(first)} records compared (timing field excluded)")
