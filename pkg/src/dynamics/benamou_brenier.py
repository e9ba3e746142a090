# -*- coding: utf-8 -*-
"""
动态作用量、Kuwada 方向不等式与 Benamou–Brenier 端到端核验

动态作用量：∫₀¹ ∫ u_p(‖v_t‖_g) dμ_t dt，按网格梯形积分。
离散网格上，多条曲线在同一位置重合时重心速度会带来 Jensen 增益（merge slack），
它在连续极限下只落在零测时间集上，报告中单独给出。
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from src.core.errors import CCIPrereqFailed, DomainMismatch
from src.dynamics.cci import CCIReport, TestFunction, check_cci, standard_battery
from src.dynamics.interpolation import (
    VelocitySeries, barycentric_velocity, curvewise_integrands, geodesic_path, merge_counts,
)
from src.geometry.spacetime import Minkowski, SpacetimeModel
from src.measures.discrete import CausalPlan, DiscreteMeasure
from src.measures.paths import LiftedPlan, MeasurePath, path_action, speed_profile
from src.transport.solver import solve_primal
from src.transport.utility import Exponent, u_p
from src.workers.batch_worker import BatchWorker

logger = logging.getLogger(__name__)

NULL_TOL = 1e-12
BB_TOL = 1e-8
KUWADA_TOL = 1e-8


def clamped_norms(V: np.ndarray, tol: float = NULL_TOL) -> np.ndarray:
    """逐行 ‖v‖_g；舍入意义下类光（v0² − |v⃗|² ≤ tol·max(1, v0²)）的向量记为 0，非因果为 −∞"""
    V = np.atleast_2d(np.asarray(V, dtype=float))
    v0 = V[:, 0]
    spatial = np.linalg.norm(V[:, 1:], axis=1)
    scale = np.maximum(1.0, np.abs(v0))
    causal = v0 >= spatial - tol * scale
    gap = v0 ** 2 - spatial ** 2
    out = np.where(gap > tol * scale ** 2, np.sqrt(np.maximum(gap, 0.0)), 0.0)
    return np.where(causal, out, -math.inf)


def _trapezoid_weights(times: np.ndarray) -> np.ndarray:
    """∫g dt ≈ ∑_k w_k g(t_k) 的梯形权重"""
    dt = np.diff(times)
    w = np.zeros(times.size)
    w[:-1] += 0.5 * dt
    w[1:] += 0.5 * dt
    return w


def _integrate(times: np.ndarray, values: np.ndarray) -> float:
    if times.size < 2:
        return 0.0
    if np.any(np.isneginf(values)):
        return -math.inf
    return float(np.dot(_trapezoid_weights(times), values))


def action_integrands(M: SpacetimeModel, P: MeasurePath, V: VelocitySeries, e: Exponent) -> np.ndarray:
    """I_k = ∫u_p(‖v_{t_k}‖) dμ_{t_k}；有正质量原子取 −∞ 时 I_k = −∞

    Raises:
        DomainMismatch: 网格不一致或速度场未覆盖支撑
    """
    M.require_geometry('dynamic_action')
    if V.times.shape != P.times.shape or np.any(np.abs(V.times - P.times) > 1e-12):
        raise DomainMismatch("速度场与测度路径的网格不一致")
    out = np.empty(len(P))
    for k, mu in enumerate(P.measures):
        vals = np.asarray(u_p(e, clamped_norms(V.aligned(k, mu))), dtype=float).reshape(-1)
        positive = mu.weights > 0
        if np.any(np.isneginf(vals[positive])):
            out[k] = -math.inf
        else:
            out[k] = float(np.dot(mu.weights[positive], vals[positive]))
    return out


def dynamic_action(M: SpacetimeModel, P: MeasurePath, V: VelocitySeries, e: Exponent) -> float:
    """∫₀¹ ∫ u_p(‖v_t‖_g) dμ_t dt（梯形积分），任一积分项为 −∞ 则为 −∞"""
    return _integrate(P.times, action_integrands(M, P, V, e))


def merge_gains(M: Minkowski, L: LiftedPlan, integrands: np.ndarray, e: Exponent,
                zero_jumps: bool = False, scale: float = 1.0) -> np.ndarray:
    """每个网格时间重心平均带来的 Jensen 增益 max(0, I_k − C_k)，非有限处记 0"""
    C = curvewise_integrands(M, L, e, zero_jumps, scale)
    with np.errstate(invalid='ignore'):
        gain = integrands - C
    return np.where(np.isfinite(gain), np.maximum(gain, 0.0), 0.0)


# ========== Kuwada 方向 ==========

@dataclass
class KuwadaInterval:
    """单个区间：u_p(路径速度) 与区间平均积分项"""
    k: int
    speed: float
    path_term: float
    dynamic_term: float
    merge_gain: float
    ok: bool

    def to_report(self) -> Dict[str, Any]:
        return {
            'k': self.k,
            'speed': self.speed,
            'path_term': self.path_term,
            'dynamic_term': self.dynamic_term,
            'merge_gain': self.merge_gain,
            'ok': self.ok,
        }


@dataclass
class KuwadaReport:
    path_action: float
    dynamic_action: float
    merge_slack: float
    tol: float
    intervals: List[KuwadaInterval] = field(default_factory=list)
    cci: Optional[CCIReport] = None

    @property
    def slack(self) -> float:
        """path_action − dynamic_action（两者同为 −∞ 时记 0）"""
        if math.isinf(self.path_action) and self.path_action == self.dynamic_action:
            return 0.0
        return self.path_action - self.dynamic_action

    @property
    def ok(self) -> bool:
        return (self.path_action >= self.dynamic_action - self.merge_slack - self.tol
                and all(row.ok for row in self.intervals))

    def to_report(self) -> Dict[str, Any]:
        return {
            'ok': self.ok,
            'path_action': self.path_action,
            'dynamic_action': self.dynamic_action,
            'slack': self.slack,
            'merge_slack': self.merge_slack,
            'intervals': [row.to_report() for row in self.intervals],
            'cci': self.cci.to_report() if self.cci else None,
        }


def check_kuwada_direction(M: SpacetimeModel, P: MeasurePath, V: VelocitySeries, e: Exponent,
                           tests: Optional[Sequence[TestFunction]] = None,
                           lifted: Optional[LiftedPlan] = None, scale: float = 1.0,
                           zero_jumps: bool = False, tol: float = KUWADA_TOL,
                           cci_tol: float = 1e-9) -> KuwadaReport:
    """核对路径作用量 ≥ 动态作用量（CCI 解的上界方向）

    Args:
        M: Minkowski 模型
        P: 测度路径
        V: 速度场，须先通过 CCI 检查
        e: 指数
        tests: CCI 试验函数组，缺省为 standard_battery
        lifted: 生成 V 的提升计划；给出时扣除网格重合处的 Jensen 增益
        scale: V 相对 lifted 重心场的阻尼系数 λ
        zero_jumps: 与构造 V 时的跳跃约定一致
        tol: 不等式容差

    Raises:
        CCIPrereqFailed: (P, V) 不满足 CCI
    """
    M.require_geometry('check_kuwada_direction')
    battery = list(tests) if tests is not None else standard_battery(M)
    cci = check_cci(M, P, V, battery, tol=cci_tol)
    if not cci.ok:
        raise CCIPrereqFailed(f"CCI 前置检查失败: {', '.join(cci.failures()[:5])}")

    speeds = speed_profile(M, P, e)
    p_action = path_action(M, P, e, speeds=speeds)
    I = action_integrands(M, P, V, e)
    d_action = _integrate(P.times, I)
    gains = np.zeros(len(P))
    if lifted is not None:
        gains = merge_gains(M, lifted, I, e, zero_jumps, scale)
    merge_slack = float(np.dot(_trapezoid_weights(P.times), gains)) if len(P) > 1 else 0.0

    report = KuwadaReport(p_action, d_action, merge_slack, tol, cci=cci)
    for k, speed in enumerate(speeds):
        lhs = float(u_p(e, speed))
        if np.isneginf(I[k]) or np.isneginf(I[k + 1]):
            rhs = -math.inf
        else:
            rhs = 0.5 * (I[k] + I[k + 1])
        gain = 0.5 * (gains[k] + gains[k + 1])
        ok = rhs == -math.inf or lhs >= rhs - gain - tol
        report.intervals.append(KuwadaInterval(k, float(speed), lhs, rhs, float(gain), ok))
    if not report.ok:
        logger.warning(f"Kuwada 方向违例: path={p_action!r}, dynamic={d_action!r}, merge={merge_slack:.3e}")
    else:
        logger.debug(f"Kuwada 方向成立: slack={report.slack!r}")
    return report


@dataclass(frozen=True)
class DualBound:
    """∫Q_1φ dμ_1 − ∫φ dμ_0 与动态作用量的比较"""
    bound: float
    dynamic_action: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.bound >= self.dynamic_action - self.tol

    def to_report(self) -> Dict[str, Any]:
        return {'ok': self.ok, 'bound': self.bound, 'dynamic_action': self.dynamic_action}


def kuwada_dual_bound(M: SpacetimeModel, P: MeasurePath, V: VelocitySeries, points: Sequence[Any],
                      phi: Sequence[float], e: Exponent, tol: float = KUWADA_TOL) -> DualBound:
    """以 Hopf–Lax 插值 Q_1φ 给出动态作用量的对偶上界

    Args:
        points: 有限集 E，须包含 μ_0 与 μ_1 的支撑
        phi: φ 在 E 上的取值

    Raises:
        DomainMismatch: E 未覆盖端点测度的支撑
    """
    from src.hopflax.semigroup import _q_columns

    pts = list(points)
    vals = np.asarray(phi, dtype=float)
    keys = {M.point_key(x): i for i, x in enumerate(pts)}
    mu0, mu1 = P.measures[0], P.measures[-1]
    missing = [x for x in (*mu0.locations, *mu1.locations) if M.point_key(x) not in keys]
    if missing:
        raise DomainMismatch(f"点集 E 未包含端点支撑: {missing[0]!r}")
    source = vals[[keys[M.point_key(x)] for x in mu0.locations]]
    Q, _, _ = _q_columns(vals, M.ell_matrix(pts, list(mu1.locations)), 1.0, e)
    if np.any(np.isneginf(Q)):
        bound = -math.inf
    else:
        bound = float(np.dot(mu1.weights, Q) - np.dot(mu0.weights, source))
    return DualBound(bound, dynamic_action(M, P, V, e), tol)


# ========== Benamou–Brenier ==========

@dataclass
class BBReport:
    """静态值与动态作用量的端到端核验记录

    Attributes:
        static_value: u_p(ℓ_p(μ0, μ1))，不可行时 −∞
        dynamic_action: 测地构造 + 重心速度场的动态作用量
        gap: static_value − dynamic_action（同为 −∞ 时为 0）
        merge_count: 全部网格时间上重合合并的曲线数
        merge_slack: 重合带来的 Jensen 增益积分
    """
    exponent: Exponent
    static_value: float
    dynamic_action: float
    feasible: bool
    tol: float = BB_TOL
    curvewise_action: float = -math.inf
    merge_count: int = 0
    merge_slack: float = 0.0
    times: List[float] = field(default_factory=list)
    speeds: List[float] = field(default_factory=list)
    integrands: List[float] = field(default_factory=list)
    cci: Optional[CCIReport] = None

    @property
    def gap(self) -> float:
        if not self.feasible or (math.isinf(self.static_value) and self.static_value == self.dynamic_action):
            return 0.0
        return self.static_value - self.dynamic_action

    @property
    def ok(self) -> bool:
        if not self.feasible:
            return self.static_value == -math.inf and self.dynamic_action == -math.inf
        cci_ok = self.cci is None or self.cci.ok
        if self.merge_count == 0:
            return abs(self.gap) <= self.tol and cci_ok
        return (self.dynamic_action >= self.static_value - self.tol
                and abs(self.gap + self.merge_slack) <= self.tol and cci_ok)

    def series_rows(self) -> List[Dict[str, Any]]:
        """时间序列：t, speed（以 t 为左端点的区间）, integrand, 各试验函数残差"""
        rows = []
        for k, t in enumerate(self.times):
            row: Dict[str, Any] = {
                't': t,
                'speed': self.speeds[k] if k < len(self.speeds) else None,
                'integrand': self.integrands[k] if k < len(self.integrands) else None,
            }
            if self.cci:
                for res in self.cci.results:
                    row[res.name] = res.residuals[k] if k < len(res.residuals) else None
            rows.append(row)
        return rows

    def to_report(self) -> Dict[str, Any]:
        return {
            'p': self.exponent.p,
            'ok': self.ok,
            'feasible': self.feasible,
            'static_value': self.static_value,
            'dynamic_action': self.dynamic_action,
            'curvewise_action': self.curvewise_action,
            'gap': self.gap,
            'merge_count': self.merge_count,
            'merge_slack': self.merge_slack,
            'times': self.times,
            'speeds': self.speeds,
            'integrands': self.integrands,
            'cci': self.cci.to_report() if self.cci else None,
        }


def _run_cci(M: Minkowski, P: MeasurePath, V: VelocitySeries, tests: Sequence[TestFunction],
             tol: float, jobs: int) -> CCIReport:
    """每个试验函数作为一个独立实例交给 BatchWorker，结果按试验函数顺序拼回"""
    if jobs <= 1 or len(tests) < 2:
        return check_cci(M, P, V, tests, tol)
    parts = BatchWorker(jobs=jobs).run(lambda test: check_cci(M, P, V, [test], tol),
                                       [(test,) for test in tests])
    failed = [part for part in parts if not part.ok]
    if failed:
        raise CCIPrereqFailed(f"CCI 检查失败（试验函数 #{failed[0].index}）: {failed[0].error}")
    return CCIReport([r for part in parts for r in part.value.results])


def verify_benamou_brenier(M: SpacetimeModel, mu0: DiscreteMeasure, mu1: DiscreteMeasure, e: Exponent,
                           grid: Union[int, Sequence[float]] = 17,
                           tests: Optional[Sequence[TestFunction]] = None,
                           tol: float = BB_TOL, cci_tol: float = 1e-9, jobs: int = 1) -> BBReport:
    """静态问题求解 → 测地插值 → 重心速度场 → 动态作用量，并附 CCI 残差

    所有失败都体现为报告字段，不抛出。

    Args:
        M: Minkowski 模型
        mu0, mu1: 端点测度
        e: 指数
        grid: 网格点数或显式网格
        tests: CCI 试验函数组，缺省为 standard_battery
        jobs: CCI 检查的并发线程数
    """
    M.require_geometry('verify_benamou_brenier')
    result = solve_primal(M, mu0, mu1, e)
    if not result.feasible or not isinstance(result.plan, CausalPlan):
        logger.info(f"静态问题不可行（{e}），两侧均为 −∞")
        return BBReport(e, -math.inf, -math.inf, False, tol)

    path, lifted = geodesic_path(M, mu0, mu1, result.plan, grid)
    V = barycentric_velocity(M, lifted)
    I = action_integrands(M, path, V, e)
    dyn = _integrate(path.times, I)
    C = curvewise_integrands(M, lifted, e)
    if np.any(np.isneginf(I)) or np.any(np.isneginf(C)):
        merge_slack = 0.0
    else:
        merge_slack = float(np.dot(_trapezoid_weights(path.times), I - C))
    merges = sum(merge_counts(lifted))
    battery = list(tests) if tests is not None else standard_battery(M)
    cci = _run_cci(M, path, V, battery, cci_tol, jobs)

    report = BBReport(
        exponent=e,
        static_value=result.value,
        dynamic_action=dyn,
        feasible=True,
        tol=tol,
        curvewise_action=lifted.curvewise_action(e),
        merge_count=merges,
        merge_slack=merge_slack,
        times=path.times.tolist(),
        speeds=speed_profile(M, path, e),
        integrands=I.tolist(),
        cci=cci,
    )
    if report.ok:
        logger.debug(f"Benamou–Brenier 核验通过: gap={report.gap:.3e}, 合并 {merges}")
    else:
        logger.warning(f"Benamou–Brenier 核验失败: static={report.static_value!r}, "
                       f"dynamic={dyn!r}, 合并 {merges}, merge_slack={merge_slack:.3e}")
    return report
