# -*- coding: utf-8 -*-
"""
Hopf–Lax 半群测试：求值、最大化元界、结构性质、渐近陡度与 HJ 不等式
"""

import math
import sys
import unittest
from pathlib import Path

import numpy as np
from hypothesis import given, settings, strategies as st

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.errors import NoTimelikePair, PropertyViolation
from src.geometry.spacetime import Event, FiniteCausal, Minkowski
from src.hopflax.fixtures import (
    causal_perturbation, chain_fixture, diamond_time_sample, kink_fixture, ladder_field, random_steep_field,
    two_point_fixture,
)
from src.hopflax.semigroup import (
    HopfLaxField, asymptotic_steepness, check_hj_inequality, check_maximizer_bound,
    check_semigroup_properties, maximizer_bound, q_eval, q_eval_detail, two_point_identity,
)
from src.transport.duality import cp_transform_fwd, steepness
from src.transport.utility import Exponent

HALF = Exponent(0.5)
MINUS_ONE = Exponent(-1.0)


class TestQEval(unittest.TestCase):
    """Q_t f(y) 单点求值"""

    def setUp(self):
        self.chain = chain_fixture()

    def test_chain_t1(self):
        c = self.chain
        r = q_eval_detail(c.model, c.points, c.f, 1.0, Event.of(2, 0), HALF)
        self.assertAlmostEqual(r.value, 3.0, places=12)
        self.assertEqual(c.points[r.argmax], Event.of(1, 0))
        self.assertAlmostEqual(r.lmax, 1.0, places=12)

    def test_chain_quarter_tie(self):
        """t = 0.25 时 (1,0) 与 (2,0) 并列，L_max 记录较大的 ℓ"""
        c = self.chain
        r = q_eval_detail(c.model, c.points, c.f, 0.25, Event.of(2, 0), HALF)
        self.assertAlmostEqual(r.value, 2.0, places=12)
        self.assertAlmostEqual(r.lmax, 1.0, places=12)

    def test_t_zero_is_f(self):
        c = self.chain
        self.assertEqual(q_eval(c.model, c.points, c.f, 0.0, Event.of(1, 0), HALF), 1.0)

    def test_no_strict_predecessor(self):
        c = self.chain
        self.assertEqual(q_eval(c.model, c.points, c.f, 0.5, Event.of(0, 0), MINUS_ONE), -math.inf)

    def test_rejects_bad_input(self):
        c = self.chain
        with self.assertRaises(ValueError):
            q_eval(c.model, c.points, [0.0, 1.0], 0.5, Event.of(1, 0), HALF)
        with self.assertRaises(ValueError):
            q_eval(c.model, c.points, c.f, 1.5, Event.of(1, 0), HALF)

    def test_finite_causal_chain(self):
        """有限因果空间上的同构链给出相同结果"""
        F = FiniteCausal([[0, 1, 2], [-math.inf, 0, 1], [-math.inf, -math.inf, 0]], labels=['a', 'b', 'c'])
        self.assertAlmostEqual(q_eval(F, ['a', 'b', 'c'], [0.0, 1.0, 2.0], 1.0, 'c', HALF), 3.0, places=12)

    def test_t1_matches_transform(self):
        c = self.chain
        field = c.build(HALF)
        np.testing.assert_allclose(field.q_function(1.0), cp_transform_fwd(c.model, c.points, c.f, HALF),
                                   atol=1e-12, rtol=0)


class TestHopfLaxField(unittest.TestCase):
    """场的构造与性质"""

    def test_chain_values(self):
        field = chain_fixture().build(HALF)
        np.testing.assert_allclose(field.q_function(1.0), [0.0, 2.0, 3.0], atol=1e-12)
        self.assertAlmostEqual(field.value(0.25, Event.of(2, 0)), 2.0, places=12)
        self.assertEqual(field.argmax_point(1.0, Event.of(2, 0)), Event.of(1, 0))
        self.assertAlmostEqual(field.lmax_at(1.0, Event.of(2, 0)), 1.0, places=12)
        np.testing.assert_array_equal(field.q_function(0.0), field.f)

    def test_chain_maximizer_bound(self):
        field = chain_fixture().build(HALF)
        self.assertAlmostEqual(maximizer_bound(1.0, 0.25, HALF), 0.25)
        self.assertTrue(check_maximizer_bound(field, 1.0, Event.of(2, 0)))
        self.assertTrue(check_maximizer_bound(field, 0.25, Event.of(2, 0)))

    def test_chain_properties(self):
        field = chain_fixture().build(HALF)
        report = check_semigroup_properties(field)
        self.assertTrue(report.monotone)
        self.assertTrue(report.young_bound_ok)
        self.assertGreaterEqual(min(report.steepness), 1.0 - 1e-9)
        self.assertLessEqual(field.value(0.25, Event.of(2, 0)), field.value(1.0, Event.of(2, 0)))
        self.assertGreater(report.lipschitz_constant, 0.0)

    def test_constant_f_rejected(self):
        c = chain_fixture()
        with self.assertRaises(PropertyViolation) as ctx:
            HopfLaxField.build(c.model, c.points, [1.0, 1.0, 1.0], 1.0, HALF, (0.5, 1.0))
        self.assertEqual(ctx.exception.which, 'steepness')

    def test_causal_monotonicity_rejected(self):
        """类光点对上 f 下降"""
        M = Minkowski(1)
        with self.assertRaises(PropertyViolation) as ctx:
            HopfLaxField.build(M, [Event.of(0, 0), Event.of(1, 1)], [1.0, 0.0], 1.0, HALF, (1.0,))
        self.assertEqual(ctx.exception.which, 'causal')

    def test_rejects_bad_grid(self):
        c = chain_fixture()
        with self.assertRaises(ValueError):
            c.build(HALF, t_grid=(0.0, 1.0))
        with self.assertRaises(ValueError):
            c.build(HALF, t_grid=(0.5, 1.5))

    def test_off_grid_lookup(self):
        field = chain_fixture().build(HALF)
        with self.assertRaises(KeyError):
            field.value(0.3, Event.of(1, 0))
        self.assertAlmostEqual(float(field.q_function(0.3)[1]), max(2 * math.sqrt(0.3), 1.0), places=12)

    def test_immutable(self):
        field = chain_fixture().build(HALF)
        with self.assertRaises(ValueError):
            field.values[0, 0] = 1.0

    def test_random_ladder_fields(self):
        """500 个梯子格点场（含 p < 0）：最大化元界、陡度、单调性、收敛与 Young 界无违例，Q_1 与 c_p 变换一致"""
        rng = np.random.default_rng(38)
        exponents = [HALF, Exponent(0.25), MINUS_ONE, Exponent(-0.5)]
        for k in range(500):
            e = exponents[k % len(exponents)]
            inputs = ladder_field(rng, ladders=int(rng.integers(1, 4)))
            self.assertTrue(50 <= len(inputs.points) <= 200)
            field = inputs.build(e)
            with self.subTest(k=k, p=e.p):
                check_semigroup_properties(field)
                for ti, t in enumerate(field.t_grid):
                    bound = maximizer_bound(field.L, float(t), e)
                    for j in field.interior:
                        winners = field.maximizers(float(t), j)
                        if winners.size:
                            self.assertLessEqual(float(field.ell[winners, j].min()), bound + 1e-12)
                np.testing.assert_allclose(field.q_function(1.0),
                                           cp_transform_fwd(inputs.model, inputs.points, inputs.f, e),
                                           atol=1e-12, rtol=0)

    def test_random_sampled_fields(self):
        """400 个菱形内随机采样的陡场：L 由采样点陡度算出，性质与最大化元界无违例"""
        rng = np.random.default_rng(57)
        exponents = [HALF, Exponent(0.25), Exponent(0.75), Exponent(0.1)]
        for k in range(400):
            e = exponents[k % len(exponents)]
            inputs = random_steep_field(rng, e, dim=1 + k % 2)
            st = steepness(inputs.model, inputs.points, inputs.f)
            field = inputs.build(e)
            with self.subTest(k=k, p=e.p):
                self.assertTrue(30 <= len(inputs.points) <= 60)
                self.assertAlmostEqual(field.L, 0.5 * e.p * st, places=12)
                report = check_semigroup_properties(field)
                self.assertTrue(report.monotone)
                self.assertTrue(report.young_bound_ok)
                self.assertEqual(report.unreachable, 0)
                for t in field.t_grid:
                    tight = float(t) * (e.p * st) ** (1.0 / (e.p - 1.0))
                    for j in field.interior:
                        self.assertTrue(check_maximizer_bound(field, float(t), field.points[j]))
                        winners = field.maximizers(float(t), j)
                        self.assertLessEqual(float(field.ell[winners, j].min()), tight + 1e-12)
                np.testing.assert_allclose(field.q_function(1.0),
                                           cp_transform_fwd(inputs.model, inputs.points, inputs.f, e),
                                           atol=1e-12, rtol=0)

    def test_causal_perturbation_monotone(self):
        rng = np.random.default_rng(58)
        M = Minkowski(2)
        for _ in range(20):
            g = causal_perturbation(rng, 2, bumps=4)
            pts = [Event.of(*rng.uniform(-1.0, 1.0, size=3)) for _ in range(40)]
            values = g(M.coords(pts))
            ell = M.ell_matrix(pts, pts)
            i, j = np.nonzero(ell >= 0)
            self.assertTrue(np.all(values[j] >= values[i] - 1e-12))

    def test_random_field_rejects_negative_p(self):
        with self.assertRaises(ValueError):
            random_steep_field(np.random.default_rng(0), MINUS_ONE)


class TestAsymptoticSteepness(unittest.TestCase):
    """渐近陡度估计"""

    def test_time_function_on_diamond(self):
        rng = np.random.default_rng(5)
        M, pts = diamond_time_sample(rng, 200)
        f = np.array([x.coords[0] for x in pts])
        est = asymptotic_steepness(M, pts, f, Event.of(1, 0), (0.5, 0.2, 0.1))
        self.assertAlmostEqual(est.value, 1.0, places=12)
        est2 = asymptotic_steepness(M, pts, 2 * f, Event.of(1, 0), (0.5, 0.2, 0.1))
        self.assertAlmostEqual(est2.value, 2.0, places=12)

    def test_kink_steep_side(self):
        k = kink_fixture()
        est = asymptotic_steepness(k.model, k.points, k.f, Event.of(0.8, 0), (0.5, 0.2, 0.1, 0.05))
        self.assertAlmostEqual(est.value, 3.0, places=9)
        values = dict(est.per_radius)
        self.assertAlmostEqual(values[0.5], 1.0, places=9)

    def test_excluded_radius(self):
        k = kink_fixture(h=0.1)
        est = asymptotic_steepness(k.model, k.points, k.f, Event.of(0.8, 0), (0.5, 0.05))
        self.assertEqual(est.excluded, [0.05])
        self.assertFalse(est.inconclusive)
        strict = asymptotic_steepness(k.model, k.points, k.f, Event.of(0.8, 0), (0.5, 0.05), strict=True)
        self.assertTrue(strict.inconclusive)
        self.assertEqual(strict.value, math.inf)

    def test_no_timelike_pair(self):
        M = Minkowski(1)
        pts = [Event.of(0, 0), Event.of(0, 1)]
        with self.assertRaises(NoTimelikePair):
            asymptotic_steepness(M, pts, [0.0, 0.0], Event.of(0, 0), (2.0, 1.0))


class TestHamiltonJacobi(unittest.TestCase):
    """HJ 不等式与两点闭式解"""

    def test_chain_report(self):
        field = chain_fixture().build(HALF)
        report = check_hj_inequality(field)
        self.assertTrue(report.ok)
        row = next(r for r in report.rows if r.t == 1.0 and r.y == 2)
        self.assertAlmostEqual(row.lmax, 1.0, places=12)
        self.assertAlmostEqual(row.st_a, 1.0, places=12)
        self.assertTrue(row.bound_ok)
        self.assertLess(abs(row.hj_slack), 1e-3)
        self.assertIn('min_slack', report.to_report())

    @settings(max_examples=100, deadline=None)
    @given(st.sampled_from([0.5, -1.0]),
           st.floats(min_value=0.1, max_value=5.0),
           st.floats(min_value=0.05, max_value=1.0))
    def test_two_point_equality(self, p, ell, t):
        """两点集上 HJ 关系取等号"""
        e = Exponent(p)
        closed = two_point_identity(ell, 0.0, t, e)
        self.assertLessEqual(abs(closed.residual), 1e-9 * max(1.0, abs(closed.derivative)))
        M, x, y = two_point_fixture(ell)
        self.assertAlmostEqual(q_eval(M, [x, y], [0.0, 0.0], t, y, e), closed.q,
                               delta=1e-12 * max(1.0, abs(closed.q)))

    def test_two_point_derivative(self):
        M, x, y = two_point_fixture(2.0)
        for e in (HALF, MINUS_ONE):
            closed = two_point_identity(2.0, 0.0, 0.5, e)
            h = 1e-6
            fd = (q_eval(M, [x, y], [0.0, 0.0], 0.5 + h, y, e) - q_eval(M, [x, y], [0.0, 0.0], 0.5, y, e)) / h
            self.assertAlmostEqual(fd, closed.derivative, delta=1e-4)

    def test_two_point_rejects_null(self):
        with self.assertRaises(ValueError):
            two_point_identity(0.0, 0.0, 0.5, HALF)


if __name__ == '__main__':
    unittest.main(verbosity=2)
