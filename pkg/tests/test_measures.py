# -*- coding: utf-8 -*-
"""
离散测度、因果计划、采样曲线与测度路径测试
"""

import math
import sys
import unittest
from pathlib import Path

import numpy as np

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.errors import InvalidCurve, InvalidMeasure, InvalidPlan, OffGridTime
from src.dynamics.interpolation import geodesic_path
from src.geometry.spacetime import Event, FiniteCausal, Minkowski
from src.measures.discrete import CausalPlan, DiscreteMeasure, measure_from_spec
from src.measures.paths import (
    LiftedPlan, MeasurePath, SampledCurve, curve_speed, marginal, path_action, path_from_spec,
    path_speed, speed_profile, teleport_lifting, teleport_path, uniform_grid,
)
from src.transport.solver import solve_primal
from src.transport.utility import Exponent, u_p

M = Minkowski(1)
HALF = Exponent(0.5)
MINUS_ONE = Exponent(-1.0)


def d1_path(grid=5):
    """δ(0,0) → δ(3,1) 的测地路径"""
    mu0, mu1 = DiscreteMeasure.dirac(Event.of(0, 0)), DiscreteMeasure.dirac(Event.of(3, 1))
    plan = solve_primal(M, mu0, mu1, HALF).plan
    return geodesic_path(M, mu0, mu1, plan, grid)


class TestDiscreteMeasure(unittest.TestCase):
    """离散测度"""

    def test_merges_coincident_atoms(self):
        mu = DiscreteMeasure([Event.of(0, 0), Event.of(0, 0), Event.of(1, 0)], [0.25, 0.25, 0.5])
        self.assertEqual(len(mu), 2)
        self.assertEqual(mu.merged_count, 1)
        self.assertAlmostEqual(mu.weight_of(Event.of(0, 0)), 0.5)
        self.assertEqual(mu.weight_of(Event.of(5, 0)), 0.0)

    def test_rejects_bad_weights(self):
        with self.assertRaises(InvalidMeasure):
            DiscreteMeasure([Event.of(0, 0)], [0.9])
        with self.assertRaises(InvalidMeasure):
            DiscreteMeasure([Event.of(0, 0), Event.of(1, 0)], [1.5, -0.5])
        with self.assertRaises(InvalidMeasure):
            DiscreteMeasure([], [])

    def test_integrate_neg_inf(self):
        mu = DiscreteMeasure([Event.of(0, 0), Event.of(1, 0)], [0.5, 0.5])
        self.assertEqual(mu.integrate([1.0, -math.inf]), -math.inf)
        self.assertAlmostEqual(mu.integrate([1.0, 3.0]), 2.0)

    def test_from_spec(self):
        mu = measure_from_spec({'atoms': [{'x': [0, 0], 'w': 0.5}, {'x': [0, 1], 'w': 0.5}]}, M)
        self.assertEqual(mu.locations, (Event.of(0, 0), Event.of(0, 1)))
        self.assertEqual(mu.to_spec()['atoms'][1], {'x': [0.0, 1.0], 'w': 0.5})

    def test_labels_on_finite_model(self):
        F = FiniteCausal([[0, 1], [-math.inf, 0]], labels=['a', 'b'])
        mu = measure_from_spec({'atoms': [{'x': 'a', 'w': 1.0}]}, F)
        self.assertEqual(mu.locations, ('a',))


class TestCausalPlan(unittest.TestCase):
    """因果计划"""

    def setUp(self):
        self.mu = DiscreteMeasure([Event.of(0, 0), Event.of(0, 3)], [0.5, 0.5])
        self.nu = DiscreteMeasure([Event.of(1, 0), Event.of(1, 3)], [0.5, 0.5])

    def test_identity_plan(self):
        plan = CausalPlan(M, self.mu, self.nu, [[0.5, 0.0], [0.0, 0.5]])
        self.assertEqual(plan.support(), [(0, 0, 0.5), (1, 1, 0.5)])

    def test_rejects_non_causal_support(self):
        with self.assertRaises(InvalidPlan):
            CausalPlan(M, self.mu, self.nu, [[0.0, 0.5], [0.5, 0.0]])

    def test_rejects_wrong_marginals(self):
        with self.assertRaises(InvalidPlan):
            CausalPlan(M, self.mu, self.nu, [[0.6, 0.0], [0.0, 0.4]])

    def test_cost_ignores_off_support(self):
        plan = CausalPlan(M, self.mu, self.nu, [[0.5, 0.0], [0.0, 0.5]])
        costs = np.array([[2.0, -math.inf], [-math.inf, 4.0]])
        self.assertAlmostEqual(plan.cost(costs), 3.0)


class TestCurves(unittest.TestCase):
    """采样曲线与曲线速度"""

    def test_straight_curve_speed(self):
        times = uniform_grid(5)
        curve = SampledCurve(M, times, [Event.of(2 * t, t) for t in times])
        for k in range(4):
            self.assertAlmostEqual(curve_speed(M, curve, k), math.sqrt(3), places=12)

    def test_constant_curve_speed(self):
        curve = SampledCurve(M, [0.0, 0.5, 1.0], [Event.of(1, 1)] * 3)
        self.assertEqual(curve_speed(M, curve, 0), 0.0)

    def test_teleport_jump_speed(self):
        """跳跃区间 Δ = 0.1、‖y − x‖ = 2 时速度为 20"""
        L = teleport_lifting(M, Event.of(0, 0), Event.of(2, 0), 11)
        curve = L.curves[3]
        self.assertEqual(curve.jumps, frozenset({3}))
        self.assertAlmostEqual(curve_speed(M, curve, 3), 20.0, places=9)
        self.assertEqual(curve_speed(M, curve, 2), 0.0)

    def test_rejects_non_causal_step(self):
        with self.assertRaises(InvalidCurve):
            SampledCurve(M, [0.0, 1.0], [Event.of(0, 0), Event.of(0.5, 2)])

    def test_rejects_non_increasing_grid(self):
        with self.assertRaises(InvalidCurve):
            SampledCurve(M, [0.0, 0.0, 1.0], [Event.of(0, 0)] * 3)

    def test_uniform_grid(self):
        self.assertEqual(uniform_grid(3), [0.0, 0.5, 1.0])
        with self.assertRaises(InvalidCurve):
            uniform_grid(1)


class TestLiftedPlan(unittest.TestCase):
    """提升计划与时间边缘"""

    def test_teleport_marginal_at_half(self):
        x, y = Event.of(0, 0), Event.of(2, 0)
        L = teleport_lifting(M, x, y, 11)
        mu = marginal(L, 0.5)
        self.assertAlmostEqual(mu.weight_of(x), 0.5, places=12)
        self.assertAlmostEqual(mu.weight_of(y), 0.5, places=12)

    def test_single_curve_marginal(self):
        times = [0.0, 0.5, 1.0]
        curve = SampledCurve(M, times, [Event.of(0, 0), Event.of(1, 0), Event.of(2, 0)])
        mu = marginal(LiftedPlan([(curve, 1.0)]), 0.5)
        self.assertEqual(mu.locations, (Event.of(1, 0),))

    def test_identical_curves_merge(self):
        times = [0.0, 1.0]
        pts = [Event.of(0, 0), Event.of(1, 0)]
        L = LiftedPlan([(SampledCurve(M, times, pts), 0.5), (SampledCurve(M, times, pts), 0.5)])
        mu = L.marginal(1.0)
        self.assertEqual(len(mu), 1)
        self.assertAlmostEqual(float(mu.weights[0]), 1.0)

    def test_off_grid_time(self):
        L = teleport_lifting(M, Event.of(0, 0), Event.of(2, 0), 3)
        with self.assertRaises(OffGridTime):
            L.marginal(0.3)

    def test_rejects_mismatched_grids(self):
        a = SampledCurve(M, [0.0, 1.0], [Event.of(0, 0), Event.of(1, 0)])
        b = SampledCurve(M, [0.0, 0.5, 1.0], [Event.of(0, 0)] * 3)
        with self.assertRaises(InvalidCurve):
            LiftedPlan([(a, 0.5), (b, 0.5)])

    def test_rejects_weight_sum(self):
        a = SampledCurve(M, [0.0, 1.0], [Event.of(0, 0), Event.of(1, 0)])
        with self.assertRaises(InvalidMeasure):
            LiftedPlan([(a, 0.7)])


class TestPathSpeed(unittest.TestCase):
    """测度路径速度与作用量"""

    def test_d1_constant_speed(self):
        path, _ = d1_path(5)
        for speed in speed_profile(M, path, HALF):
            self.assertAlmostEqual(speed, 2 * math.sqrt(2), places=9)

    def test_d1_action(self):
        for grid in (2, 5, 9):
            path, _ = d1_path(grid)
            self.assertAlmostEqual(path_action(M, path, HALF), 2 * 8 ** 0.25, places=9)

    def test_constant_path(self):
        mu = DiscreteMeasure([Event.of(0, 0), Event.of(0, 1)], [0.5, 0.5])
        path = MeasurePath(M, [0.0, 0.5, 1.0], [mu, mu, mu])
        self.assertEqual(path_speed(M, path, HALF, 0), 0.0)
        self.assertEqual(path_action(M, path, HALF), 0.0)

    def test_path_rejects_backwards_step(self):
        a = DiscreteMeasure.dirac(Event.of(1, 0))
        b = DiscreteMeasure.dirac(Event.of(0, 0))
        with self.assertRaises(InvalidMeasure):
            MeasurePath(M, [0.0, 1.0], [a, b])

    def test_teleport_closed_form(self):
        """u_{1/2}(ℓ_{1/2}(μ_s, μ_t)) = 2√2·(t − s)，p = −1 时为 −∞"""
        rng = np.random.default_rng(36)
        x, y = Event.of(0, 0), Event.of(2, 0)
        for _ in range(50):
            s, t = sorted(rng.uniform(0.01, 0.99, size=2))
            if t - s < 1e-6:
                continue
            path = teleport_path(M, x, y, [0.0, s, t, 1.0])
            mu_s, mu_t = path.at(s), path.at(t)
            value = solve_primal(M, mu_s, mu_t, HALF).value
            self.assertAlmostEqual(value, 2 * math.sqrt(2) * (t - s), delta=1e-12)
            self.assertAlmostEqual(path_speed(M, path, HALF, 1), 2 * (t - s), delta=1e-12)
            self.assertEqual(solve_primal(M, mu_s, mu_t, MINUS_ONE).value, -math.inf)

    def test_teleport_action(self):
        path = teleport_path(M, Event.of(0, 0), Event.of(2, 0), 2)
        self.assertAlmostEqual(path_action(M, path, HALF), float(u_p(HALF, 2.0)) * 1.0, places=12)
        self.assertAlmostEqual(path_action(M, path, HALF), 2 * math.sqrt(2), places=12)
        fine = teleport_path(M, Event.of(0, 0), Event.of(2, 0), 9)
        self.assertEqual(path_action(M, fine, MINUS_ONE), -math.inf)

    def test_path_from_spec(self):
        spec = {
            'times': [0.0, 1.0],
            'measures': [
                {'atoms': [{'x': [0, 0], 'w': 1.0}]},
                {'atoms': [{'x': [3, 1], 'w': 1.0}]},
            ],
        }
        path = path_from_spec(spec, M)
        self.assertEqual(len(path), 2)
        self.assertAlmostEqual(path_speed(M, path, HALF, 0), 2 * math.sqrt(2), places=12)


if __name__ == '__main__':
    unittest.main(verbosity=2)
