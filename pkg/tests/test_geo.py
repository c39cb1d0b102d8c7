"""Geodesic run: jump direction, locality indicator, resampling, full traces."""

import numpy as np
import pytest

import geoseek.geo as geo_module
from geoseek import (
    GeoConfig,
    ObjectiveHandle,
    get,
    jump_direction,
    locality_indicator,
    make_objective,
    resample_out_of_bounds,
    run_geo,
)


def _quadratic_objective(center, offset=0.0):
    center = np.asarray(center, dtype=float)

    def value(x):
        d = x - center
        return offset - 0.5 * float(d @ d)

    def grad(x):
        return -(x - center)

    return ObjectiveHandle(value, grad, center.shape[0])


class TestJumpDirection:
    def test_flat_values_give_exact_zero(self):
        xs = [[0.0, 1.0], [2.0, -1.0], [5.0, 3.0]]
        np.testing.assert_array_equal(jump_direction(xs, [2.0, 2.0, 2.0]), [0.0, 0.0])

    def test_two_point_hand_value(self):
        result = jump_direction([[0.0], [1.0]], [0.0, 1.0])
        assert result[0] == pytest.approx(0.5)

    def test_points_toward_elevated_neighbor(self):
        # local max at 0, neighbor bump centered at x=3 elevates the right side
        def phi(x):
            return np.exp(-x ** 2) + 0.5 * np.exp(-((x - 3.0) ** 2))

        positions = np.linspace(-1.0, 1.0, 41)
        values = phi(positions)
        result = jump_direction(positions[:, None], values)
        assert result[0] > 0.0

    def test_invariant_under_value_shift(self):
        rng = np.random.default_rng(3)
        xs = rng.uniform(-2, 2, (30, 4))
        vals = rng.uniform(-5, 5, 30)
        base = jump_direction(xs, vals)
        shifted = jump_direction(xs, vals + 123.456)
        np.testing.assert_allclose(shifted, base, atol=1e-12)

    def test_rejects_empty_or_mismatched(self):
        with pytest.raises(ValueError):
            jump_direction([], [])
        with pytest.raises(ValueError):
            jump_direction([[0.0]], [1.0, 2.0])


class TestLocalityIndicator:
    def test_constant_both_branches(self):
        assert locality_indicator([1.0, 1.0], [1.0, 1.0], 0.05) == 2

    def test_forward_dip_gives_zero(self):
        assert locality_indicator([1.0, 0.2, 1.0], [1.0], 0.05) == 0

    def test_backward_disagreement_gives_one(self):
        assert locality_indicator([1.0, 1.0, 1.0], [2.0, 2.0], 0.05) == 1

    def test_backward_not_flat_gives_one(self):
        assert locality_indicator([1.0, 1.0], [1.0, 0.5], 0.05) == 1

    def test_near_zero_values_use_floor(self):
        # all values equal at 0 are flat despite the zero maximum
        assert locality_indicator([0.0, 0.0], [0.0, 0.0], 0.05) == 2


class TestResample:
    def test_inside_box_unchanged(self):
        x = np.array([0.5, 0.5])
        out = resample_out_of_bounds(x, np.zeros(2), np.ones(2), np.random.default_rng(0))
        np.testing.assert_array_equal(out, x)

    def test_outside_box_resamples_inside(self):
        rng = np.random.default_rng(1)
        out = resample_out_of_bounds([1.1, 0.5], np.zeros(2), np.ones(2), rng)
        assert np.all(out >= 0.0) and np.all(out <= 1.0)
        assert not np.array_equal(out, [1.1, 0.5])

    def test_uniform_law_of_large_numbers(self):
        rng = np.random.default_rng(2)
        draws = np.array(
            [resample_out_of_bounds([2.0, 2.0], np.zeros(2), np.ones(2), rng)
             for _ in range(10_000)]
        )
        assert np.all(np.abs(draws.mean(axis=0) - 0.5) < 0.02)


class TestRunGeo:
    def _config(self, lower, upper, **kw):
        defaults = dict(steps=25, t_qn=10, use_qn=True, dt_lb=0.05,
                        lower=np.asarray(lower, float), upper=np.asarray(upper, float))
        defaults.update(kw)
        return GeoConfig(**defaults)

    def test_offset_quadratic_finds_max_with_k2(self):
        # whole box within the 5% band of the maximum: both branches flat
        obj = _quadratic_objective([0.5, -0.3], offset=100.0)
        rng = np.random.default_rng(3)
        lower, upper = np.full(2, -1.5), np.full(2, 1.5)
        for _ in range(5):
            res = run_geo(obj, self._config(lower, upper), rng.uniform(lower, upper), rng)
            assert res.k == 2
            assert abs(res.phi_star - 100.0) <= 0.05 * 100.0
            assert abs(res.phi_star - 100.0) < 1e-6  # quasi-Newton lands on top

    def test_single_step_no_qn(self):
        obj = _quadratic_objective([0.0, 0.0])
        x0 = np.array([1.0, 1.0])
        res = run_geo(obj, self._config([-5, -5], [5, 5], steps=1, use_qn=False),
                      x0, np.random.default_rng(0))
        forward = [r for r in res.trace if r.branch == "forward"]
        backward = [r for r in res.trace if r.branch == "backward"]
        assert len(forward) == 1 and len(backward) == 1
        assert res.phi_star == obj.value(x0)
        assert res.r_bar == 0.0

    def test_no_qn_call_accounting(self):
        obj = _quadratic_objective([0.0, 0.0])
        res = run_geo(obj, self._config([-5, -5], [5, 5], steps=12, use_qn=False),
                      np.array([1.0, 0.5]), np.random.default_rng(1))
        # one value + one gradient per trace point, both branches, nothing else
        assert res.value_calls == 24
        assert res.gradient_calls == 24
        assert res.r_bar == 0.0

    def test_qn_cadence(self, monkeypatch):
        calls = []
        real = geo_module.maximize_local

        def spy(objective, x0, settings):
            calls.append(np.array(x0))
            return real(objective, x0, settings)

        monkeypatch.setattr(geo_module, "maximize_local", spy)
        obj = _quadratic_objective([0.0, 0.0])
        run_geo(obj, self._config([-50, -50], [50, 50], steps=25, t_qn=10, dt_lb=0.01),
                np.array([1.0, 0.5]), np.random.default_rng(2))
        assert len(calls) == 2 * (25 // 10)  # two branches

    def test_trace_stays_in_box(self):
        spec = get("camel")
        obj = make_objective(spec)
        res = run_geo(obj, self._config(spec.lower, spec.upper, steps=50, dt_lb=0.1),
                      np.zeros(2), np.random.default_rng(5))
        for row in res.trace:
            assert np.all(row.x >= spec.lower) and np.all(row.x <= spec.upper)

    def test_phi_star_is_trace_maximum(self):
        spec = get("camel")
        obj = make_objective(spec)
        res = run_geo(obj, self._config(spec.lower, spec.upper, steps=30, dt_lb=0.08),
                      np.array([1.0, 1.0]), np.random.default_rng(9))
        assert res.phi_star == max(row.phi for row in res.trace)

    def test_jump_unit_is_normalized_or_none(self):
        spec = get("two-bump")
        obj = make_objective(spec)
        res = run_geo(obj, self._config(spec.lower, spec.upper, steps=40, use_qn=False),
                      np.array([1.5, 0.2]), np.random.default_rng(11))
        if res.jump_unit is not None:
            assert np.linalg.norm(res.jump_unit) == pytest.approx(1.0)

    def test_flat_field_yields_none_jump_and_k2(self):
        obj = ObjectiveHandle(lambda x: 5.0, lambda x: np.zeros_like(x), 2)
        res = run_geo(obj, self._config([-5, -5], [5, 5], steps=10, use_qn=False),
                      np.zeros(2), np.random.default_rng(4))
        assert res.jump_unit is None
        assert res.k == 2

    def test_non_finite_start_raises(self):
        obj = ObjectiveHandle(lambda x: float("nan"), lambda x: np.zeros_like(x), 2)
        with pytest.raises(ValueError, match="non-finite"):
            run_geo(obj, self._config([-1, -1], [1, 1]), np.zeros(2),
                    np.random.default_rng(0))

    def test_non_finite_pocket_triggers_resample(self):
        def value(x):
            if np.linalg.norm(x - [2.0, 0.0]) < 1.0:
                return float("nan")
            return -0.5 * float(x @ x)

        def grad(x):
            return -x

        obj = ObjectiveHandle(value, grad, 2)
        res = run_geo(obj, self._config([-5, -5], [5, 5], steps=40, use_qn=False,
                                        dt_lb=0.5),
                      np.array([0.5, 0.0]), np.random.default_rng(8))
        assert len(res.trace) == 80
        for row in res.trace:
            assert np.isfinite(row.phi)

    def test_x0_outside_box_rejected(self):
        obj = _quadratic_objective([0.0, 0.0])
        with pytest.raises(ValueError, match="inside"):
            run_geo(obj, self._config([-1, -1], [1, 1]), np.array([2.0, 0.0]),
                    np.random.default_rng(0))

    def test_two_bump_jump_points_toward_taller_bump(self):
        # Monte-Carlo sign check of the jump direction for traces started
        # on the lower bump
        spec = get("two-bump")
        c1, c2 = np.array([-1.5, 0.0]), np.array([1.5, 0.0])
        toward_global = (c1 - c2) / np.linalg.norm(c1 - c2)
        rng = np.random.default_rng(123)
        hits = 0
        for _ in range(100):
            angle = rng.uniform(0.0, 2.0 * np.pi)
            radius = rng.uniform(0.0, 0.5)
            x0 = c2 + radius * np.array([np.cos(angle), np.sin(angle)])
            obj = make_objective(spec)
            res = run_geo(
                obj,
                self._config(spec.lower, spec.upper, steps=400, use_qn=False),
                x0,
                rng,
            )
            if res.jump_unit is not None and float(res.jump_unit @ toward_global) > 0.0:
                hits += 1
        assert hits >= 80
