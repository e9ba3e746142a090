# -*- coding: utf-8 -*-
"""
静态运输测试：效用函数、可行性、精确求解、对偶性与 c_p 变换
"""

import math
import sys
import time
import unittest
from pathlib import Path

import numpy as np
from hypothesis import given, settings, strategies as st

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.errors import DualityGap, InvalidExponent
from src.geometry.sampling import random_feasible_pair, random_measure
from src.geometry.spacetime import Event, Minkowski
from src.measures.discrete import CausalPlan, DiscreteMeasure
from src.transport.duality import (
    cp_transform_bwd, cp_transform_fwd, max_abs_time, steepness, verify_duality,
)
from src.transport.feasibility import Feasible, Infeasible, feasible
from src.transport.oracles import brute_force_optimum, lp_feasible
from src.transport.solver import PotentialPair, SolveResult, solve_primal
from src.transport.utility import Exponent, conjugate, u_p, u_p_inverse

M1 = Minkowski(1)
HALF = Exponent(0.5)
MINUS_ONE = Exponent(-1.0)


def pair(atoms0, atoms1):
    """由 ((t, x), w) 列表构造一对测度"""
    mu = DiscreteMeasure([Event.of(*x) for x, _ in atoms0], [w for _, w in atoms0])
    nu = DiscreteMeasure([Event.of(*y) for y, _ in atoms1], [w for _, w in atoms1])
    return mu, nu


def s2_pair():
    return pair([((0, -1), 0.5), ((0, 1), 0.5)], [((2, -1), 0.5), ((2, 1), 0.5)])


class TestUtility(unittest.TestCase):
    """指数与效用函数"""

    def test_examples(self):
        self.assertAlmostEqual(u_p(HALF, 4.0), 4.0, places=12)
        self.assertEqual(u_p(MINUS_ONE, 0.0), -math.inf)
        self.assertEqual(u_p(MINUS_ONE, math.inf), 0.0)
        self.assertEqual(u_p(HALF, 0.0), 0.0)
        self.assertEqual(u_p(HALF, -math.inf), -math.inf)
        self.assertEqual(u_p(HALF, math.inf), math.inf)

    def test_conjugate(self):
        self.assertAlmostEqual(conjugate(0.5), -1.0)
        self.assertAlmostEqual(conjugate(-1.0), 0.5)
        self.assertAlmostEqual(HALF.conjugate.conjugate.p, 0.5)

    def test_rejects_exponents(self):
        for p in (0.0, 1.0, 2.0, math.nan):
            with self.assertRaises(InvalidExponent):
                Exponent(p)

    def test_vectorized(self):
        out = u_p(MINUS_ONE, np.array([-math.inf, 0.0, 2.0, math.inf]))
        np.testing.assert_array_equal(out, [-math.inf, -math.inf, -0.5, 0.0])

    @settings(max_examples=200, deadline=None)
    @given(st.sampled_from([0.25, 0.5, 0.9, -0.5, -1.0, -3.0]),
           st.floats(min_value=1e-3, max_value=1e3))
    def test_inverse(self, p, z):
        """u_p 在 (0, ∞) 上严格递增且可逆"""
        e = Exponent(p)
        self.assertAlmostEqual(u_p_inverse(e, u_p(e, z)) / z, 1.0, places=9)
        self.assertLess(u_p(e, z), u_p(e, z * 1.01))


class TestFeasibility(unittest.TestCase):
    """μ ⪯ ν 的判定"""

    def test_d1(self):
        mu, nu = pair([((0, 0), 1.0)], [((3, 1), 1.0)])
        verdict = feasible(M1, mu, nu)
        self.assertIsInstance(verdict, Feasible)
        self.assertAlmostEqual(float(verdict.witness.matrix[0, 0]), 1.0)

    def test_past_target(self):
        mu, nu = pair([((0, 0), 1.0)], [((-1, 0), 1.0)])
        verdict = feasible(M1, mu, nu)
        self.assertIsInstance(verdict, Infeasible)
        self.assertEqual(verdict.cut, [0])
        self.assertFalse(verdict.is_feasible)

    def test_spacelike_cross_identity_witness(self):
        mu, nu = pair([((0, 0), 0.5), ((0, 3), 0.5)], [((1, 0), 0.5), ((1, 3), 0.5)])
        verdict = feasible(M1, mu, nu)
        self.assertIsInstance(verdict, Feasible)
        np.testing.assert_allclose(verdict.witness.matrix, [[0.5, 0.0], [0.0, 0.5]], atol=1e-12)

    def test_hall_violation_cut(self):
        """(0,3) 的质量无法到达 (1,0)"""
        mu, nu = pair([((0, 0), 0.5), ((0, 3), 0.5)], [((1, 0), 1.0)])
        verdict = feasible(M1, mu, nu)
        self.assertIsInstance(verdict, Infeasible)
        self.assertEqual(verdict.cut, [1])
        self.assertGreater(verdict.cut_mass, verdict.neighbor_mass)

    def test_null_only_strict(self):
        mu, nu = pair([((0, 0), 1.0)], [((1, 1), 1.0)])
        self.assertTrue(feasible(M1, mu, nu).is_feasible)
        self.assertFalse(feasible(M1, mu, nu, strict=True).is_feasible)

    def test_agrees_with_lp(self):
        """200 个 ≤ 6×6 的随机实例与 linprog 判定一致"""
        rng = np.random.default_rng(9)
        for k in range(200):
            n, m = rng.integers(1, 7, size=2)
            shift = rng.uniform(0.0, 2.0)
            mu = random_measure(rng, M1, int(n), (0.0, 1.0))
            nu = random_measure(rng, M1, int(m), (shift, shift + 1.0))
            strict = bool(k % 2)
            ell = M1.ell_matrix(mu.locations, nu.locations)
            expected = lp_feasible(ell, mu.weights, nu.weights, strict)
            with self.subTest(k=k):
                self.assertEqual(feasible(M1, mu, nu, strict=strict, ell=ell).is_feasible, expected)


class TestSolver(unittest.TestCase):
    """精确求解"""

    def test_s2_half(self):
        mu, nu = s2_pair()
        r = solve_primal(M1, mu, nu, HALF)
        self.assertAlmostEqual(r.value, 2 * math.sqrt(2), places=12)
        self.assertAlmostEqual(r.ell_p, 2.0, places=12)
        np.testing.assert_allclose(r.plan.matrix, [[0.5, 0.0], [0.0, 0.5]], atol=1e-12)

    def test_s2_minus_one(self):
        mu, nu = s2_pair()
        r = solve_primal(M1, mu, nu, MINUS_ONE)
        self.assertAlmostEqual(r.value, -0.5, places=12)
        self.assertAlmostEqual(r.ell_p, 2.0, places=12)

    def test_split_target(self):
        """δ(0,0) → ½δ(1,0)+½δ(2,0)，p = ½ 时值为 1 + √2"""
        mu, nu = pair([((0, 0), 1.0)], [((1, 0), 0.5), ((2, 0), 0.5)])
        r = solve_primal(M1, mu, nu, HALF)
        self.assertAlmostEqual(r.value, 1 + math.sqrt(2), places=12)

    def test_d1_potentials(self):
        mu, nu = pair([((0, 0), 1.0)], [((3, 1), 1.0)])
        r = solve_primal(M1, mu, nu, HALF)
        self.assertAlmostEqual(r.value, 2 * 8 ** 0.25, places=12)
        self.assertAlmostEqual(float(r.potentials.psi[0] - r.potentials.phi[0]), r.value, places=12)
        self.assertAlmostEqual(r.gap, 0.0, places=12)

    def test_infeasible(self):
        mu, nu = pair([((0, 0), 1.0)], [((-1, 0), 1.0)])
        r = solve_primal(M1, mu, nu, HALF)
        self.assertFalse(r.feasible)
        self.assertEqual(r.value, -math.inf)
        report = r.to_report()
        self.assertEqual(report['cut'], [0])
        self.assertIsNone(report['plan'])

    def test_null_only_negative_exponent(self):
        """p < 0 且只有类光匹配：值 −∞，ℓ_p = 0"""
        mu, nu = pair([((0, 0), 1.0)], [((1, 1), 1.0)])
        r = solve_primal(M1, mu, nu, MINUS_ONE)
        self.assertEqual(r.value, -math.inf)
        self.assertEqual(r.ell_p, 0.0)
        self.assertAlmostEqual(solve_primal(M1, mu, nu, HALF).value, 0.0, places=12)

    def test_report_fields(self):
        mu, nu = s2_pair()
        report = solve_primal(M1, mu, nu, HALF).to_report()
        self.assertEqual(set(report), {'p', 'value', 'ell_p', 'plan', 'phi', 'psi', 'gap'})

    def test_brute_force_agreement(self):
        """100 个 ≤ 4×4 的随机实例与顶点枚举一致"""
        rng = np.random.default_rng(21)
        exponents = [HALF, Exponent(0.25), MINUS_ONE, Exponent(-2.0)]
        for k in range(100):
            e = exponents[k % len(exponents)]
            n, m = (int(v) for v in rng.integers(1, 5, size=2))
            dim = 1 if k % 3 else 2
            mu, nu = random_feasible_pair(rng, Minkowski(dim), n, m, time_shift=1.5,
                                          strict=e.negative)
            r = solve_primal(Minkowski(dim), mu, nu, e)
            expected = brute_force_optimum(r.costs, mu.weights, nu.weights)
            with self.subTest(k=k, p=e.p):
                self.assertAlmostEqual(r.value, expected, delta=1e-10 * max(1.0, abs(expected)))


class TestDuality(unittest.TestCase):
    """强对偶与陡化"""

    def test_s2_steepening(self):
        mu, nu = s2_pair()
        r = solve_primal(M1, mu, nu, HALF)
        report = verify_duality(M1, mu, nu, HALF, r, epsilons=(0.01,))
        self.assertTrue(report.ok)
        self.assertLessEqual(report.steepening[0]['shift'], 0.06 + 1e-12)
        self.assertAlmostEqual(report.steepening[0]['bound'], 0.06, places=12)

    def test_max_abs_time(self):
        """支撑时间范围两端各加余量 1"""
        self.assertEqual(max_abs_time(M1, [Event.of(0, 0), Event.of(2, 0)]), 3.0)
        self.assertEqual(max_abs_time(M1, [Event.of(-2, 1), Event.of(0.5, 0)]), 3.0)
        self.assertEqual(max_abs_time(M1, [Event.of(0, 0)], margin=0.5), 0.5)

    def test_random_instances(self):
        """200 个随机实例：|gap| ≤ 1e−9·max(1,|primal|)，单次求解 < 1 s"""
        rng = np.random.default_rng(4)
        exponents = [HALF, Exponent(0.75), MINUS_ONE, Exponent(-2.0)]
        for k in range(200):
            e = exponents[k % len(exponents)]
            dim = 1 if k % 2 else 3
            M = Minkowski(dim)
            n, m = (int(v) for v in rng.integers(3, 16, size=2))
            mu, nu = random_feasible_pair(rng, M, n, m, spatial_extent=1.0 if dim == 1 else 0.5,
                                          strict=e.negative)
            start = time.perf_counter()
            r = solve_primal(M, mu, nu, e)
            elapsed = time.perf_counter() - start
            with self.subTest(k=k, p=e.p):
                self.assertLess(elapsed, 1.0)
                report = verify_duality(M, mu, nu, e, r)
                self.assertLessEqual(abs(report.gap), 1e-9 * max(1.0, abs(r.value)))
                self.assertLessEqual(report.max_violation, 1e-9 * max(1.0, float(np.abs(r.costs[np.isfinite(r.costs)]).max())))

    def test_detects_bad_potentials(self):
        mu, nu = s2_pair()
        r = solve_primal(M1, mu, nu, HALF)
        bad = SolveResult(r.value, r.ell_p, r.plan,
                          PotentialPair(r.potentials.phi, r.potentials.psi - 1.0),
                          r.costs, r.exponent)
        with self.assertRaises(DualityGap) as ctx:
            verify_duality(M1, mu, nu, HALF, bad, epsilons=())
        self.assertIn('gap', ctx.exception.details['failed'])

    def test_rejects_infeasible(self):
        mu, nu = pair([((0, 0), 1.0)], [((-1, 0), 1.0)])
        r = solve_primal(M1, mu, nu, HALF)
        with self.assertRaises(ValueError):
            verify_duality(M1, mu, nu, HALF, r)


class TestTransforms(unittest.TestCase):
    """c_p 变换与陡度"""

    def setUp(self):
        self.E = [Event.of(0, 0), Event.of(1, 0), Event.of(2, 0)]
        self.phi = [0.0, 1.0, 2.0]

    def test_forward_example(self):
        out = cp_transform_fwd(M1, self.E, self.phi, HALF, at=[Event.of(2, 0)])
        self.assertAlmostEqual(float(out[0]), 2 * math.sqrt(2), places=12)

    def test_forward_at_source(self):
        out = cp_transform_fwd(M1, self.E, self.phi, HALF, at=[Event.of(0, 0)])
        self.assertAlmostEqual(float(out[0]), 0.0, places=12)
        out = cp_transform_fwd(M1, self.E, self.phi, MINUS_ONE, at=[Event.of(0, 0)])
        self.assertEqual(float(out[0]), -math.inf)

    def test_backward_example(self):
        psi = [0.0, 2.0, 3.0]
        E = [Event.of(0, 0), Event.of(1, 0), Event.of(2, 0)]
        out = cp_transform_bwd(M1, E, psi, HALF, at=[Event.of(0, 0)])
        self.assertAlmostEqual(float(out[0]), 3 - 2 * math.sqrt(2), places=12)

    def test_double_transform_stable(self):
        """S2 最优 φ 经正反变换不变"""
        mu, nu = s2_pair()
        r = solve_primal(M1, mu, nu, HALF)
        X, Y = list(mu.locations), list(nu.locations)
        psi = cp_transform_fwd(M1, X, r.potentials.phi, HALF, at=Y)
        phi2 = cp_transform_bwd(M1, Y, psi, HALF, at=X)
        np.testing.assert_allclose(phi2, r.potentials.phi, atol=1e-12)
        psi2 = cp_transform_fwd(M1, X, phi2, HALF, at=Y)
        np.testing.assert_allclose(psi2, psi, atol=1e-12)

    def test_steepness(self):
        E = [Event.of(0, 0), Event.of(2, 0), Event.of(0, 5)]
        self.assertAlmostEqual(steepness(M1, E, [0.0, 2.0, 0.0]), 1.0, places=12)
        self.assertAlmostEqual(steepness(M1, self.E, [0.0, 2.0, 4.0]), 2.0, places=12)
        self.assertEqual(steepness(M1, self.E, [1.0, 1.0, 1.0]), 0.0)
        self.assertEqual(steepness(M1, [Event.of(0, 0), Event.of(0, 1)], [0.0, 0.0]), math.inf)

    def test_plan_is_causal(self):
        rng = np.random.default_rng(2)
        mu, nu = random_feasible_pair(rng, M1, 5, 4)
        r = solve_primal(M1, mu, nu, HALF)
        self.assertIsInstance(r.plan, CausalPlan)
        np.testing.assert_allclose(r.plan.matrix.sum(axis=1), mu.weights, atol=1e-9)
        np.testing.assert_allclose(r.plan.matrix.sum(axis=0), nu.weights, atol=1e-9)


class TestReverseTriangle(unittest.TestCase):
    """ℓ_p 的反三角不等式"""

    @staticmethod
    def _shift(mu, dt):
        return DiscreteMeasure([Event((x.coords[0] + dt, *x.coords[1:])) for x in mu.locations], mu.weights)

    def test_random_chains(self):
        """μ ⪯ ν ⪯ ρ 时 ℓ_p(μ,ρ) ≥ ℓ_p(μ,ν) + ℓ_p(ν,ρ)"""
        rng = np.random.default_rng(17)
        for k in range(60):
            e = HALF if k % 2 == 0 else Exponent(0.25)
            mu, nu = random_feasible_pair(rng, M1, 4, 5, time_shift=1.5)
            rho = self._shift(random_measure(rng, M1, 3, (0.0, 1.0), 0.5), 4.0)
            first = solve_primal(M1, mu, nu, e).ell_p
            second = solve_primal(M1, nu, rho, e).ell_p
            whole = solve_primal(M1, mu, rho, e).ell_p
            with self.subTest(k=k, p=e.p):
                self.assertGreaterEqual(whole, first + second - 1e-9 * max(1.0, whole))

    def test_shifted_dirac_equality(self):
        """同一类时直线上的三个 Dirac 测度取等号"""
        d = [DiscreteMeasure.dirac(Event.of(t, 0)) for t in (0, 1, 3)]
        a = solve_primal(M1, d[0], d[1], HALF).ell_p
        b = solve_primal(M1, d[1], d[2], HALF).ell_p
        c = solve_primal(M1, d[0], d[2], HALF).ell_p
        self.assertAlmostEqual(c, a + b, places=12)


if __name__ == '__main__':
    unittest.main(verbosity=2)
