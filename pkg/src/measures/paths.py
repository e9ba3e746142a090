# -*- coding: utf-8 -*-
"""
采样因果曲线、提升计划与测度路径

SampledCurve：时间网格上的离散因果曲线（γ_{t_k} ≤ γ_{t_{k+1}}）。
LiftedPlan：共享同一网格的加权曲线族，其时间边缘就是一条测度路径。
MeasurePath：网格上的测度序列，相邻测度满足 μ_{t_k} ⪯ μ_{t_{k+1}}。

跳跃采用左连续约定：区间 (t_k, t_{k+1}] 上的跳跃把新位置记在 t_{k+1}。
"""
import logging
import math
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.errors import InvalidCurve, InvalidMeasure, OffGridTime
from src.geometry.spacetime import Event, SpacetimeModel
from src.measures.discrete import DiscreteMeasure, measure_from_spec

logger = logging.getLogger(__name__)

GRID_TOL = 1e-12
CURVE_WEIGHT_TOL = 1e-12
NULL_TOL = 1e-12


def _check_grid(times: Sequence[float]) -> np.ndarray:
    """严格递增且落在 [0,1] 内的时间网格"""
    grid = np.asarray(times, dtype=float).reshape(-1)
    if grid.size == 0:
        raise InvalidCurve("时间网格不能为空")
    if not np.all(np.isfinite(grid)) or grid.min() < -GRID_TOL or grid.max() > 1.0 + GRID_TOL:
        raise InvalidCurve(f"时间网格必须落在 [0,1]: {grid.tolist()}")
    if grid.size > 1 and np.any(np.diff(grid) <= 0):
        raise InvalidCurve("时间网格必须严格递增")
    grid.setflags(write=False)
    return grid


def _grid_index(grid: np.ndarray, t: float) -> int:
    hits = np.flatnonzero(np.abs(grid - float(t)) <= GRID_TOL)
    if hits.size == 0:
        raise OffGridTime(f"时间 {t} 不在网格上")
    return int(hits[0])


def _causal_steps(M: SpacetimeModel, pts: Sequence[Any]) -> np.ndarray:
    """相邻点的 ℓ；Minkowski 中舍入造成的近类光步（Δt ≥ |Δx⃗| − NULL_TOL·max(1,Δt)）记为 0"""
    steps = np.array([M.time_separation(a, b) for a, b in zip(pts[:-1], pts[1:])])
    if M.supports_geometry and np.any(np.isneginf(steps)):
        X = np.array([p.coords for p in pts], dtype=float)
        D = np.diff(X, axis=0)
        dt, dx = D[:, 0], np.linalg.norm(D[:, 1:], axis=1)
        near_null = np.isneginf(steps) & (dt >= 0) & (dt >= dx - NULL_TOL * np.maximum(1.0, dt))
        steps[near_null] = 0.0
    return steps


def uniform_grid(n: int) -> List[float]:
    """[0,1] 上 n 个点的等距网格（n ≥ 2）"""
    if int(n) < 2:
        raise InvalidCurve(f"网格至少需要 2 个点: {n}")
    return np.linspace(0.0, 1.0, int(n)).tolist()


class SampledCurve:
    """时间网格上的离散因果曲线

    Args:
        M: 时空模型
        times: 严格递增网格
        points: 每个网格时间上的位置
        jumps: 发生跳跃的区间下标 k（区间 (t_k, t_{k+1}]）
    """

    def __init__(self, M: SpacetimeModel, times: Sequence[float], points: Sequence[Any],
                 jumps: Iterable[int] = ()):
        grid = _check_grid(times)
        pts = [M.validate_point(p) for p in points]
        if len(pts) != grid.size:
            raise InvalidCurve(f"点数 {len(pts)} 与网格长度 {grid.size} 不符")
        if len(pts) > 1:
            steps = _causal_steps(M, pts)
            bad = np.flatnonzero(~(steps >= 0))
            if bad.size:
                k = int(bad[0])
                raise InvalidCurve(f"第 {k} 段不是因果的: {pts[k]!r} ≰ {pts[k + 1]!r}")
            self._steps = steps
        else:
            self._steps = np.zeros(0)
        jump_set = frozenset(int(k) for k in jumps)
        if any(k < 0 or k >= grid.size - 1 for k in jump_set):
            raise InvalidCurve(f"跳跃区间下标越界: {sorted(jump_set)}")
        self.model = M
        self.times = grid
        self.points: Tuple[Any, ...] = tuple(pts)
        self.jumps: FrozenSet[int] = jump_set

    def __len__(self) -> int:
        return len(self.points)

    def __repr__(self):
        return f"SampledCurve(points={len(self)}, jumps={sorted(self.jumps)})"

    def at(self, t: float) -> Any:
        """求值映射 e_t"""
        return self.points[_grid_index(self.times, t)]

    def intervals(self) -> int:
        return len(self.points) - 1

    def step_separation(self, k: int) -> float:
        """ℓ(γ_{t_k}, γ_{t_{k+1}})"""
        return float(self._steps[k])

    def to_spec(self) -> Dict[str, Any]:
        pts = [list(p.coords) if isinstance(p, Event) else p for p in self.points]
        spec: Dict[str, Any] = {'points': pts}
        if self.jumps:
            spec['jumps'] = sorted(self.jumps)
        return spec


class LiftedPlan:
    """曲线族上的概率测度（离散提升）

    Args:
        curves: (SampledCurve, 权重) 列表，网格必须一致
    """

    def __init__(self, curves: Sequence[Tuple[SampledCurve, float]], tol: float = CURVE_WEIGHT_TOL):
        items = list(curves)
        if not items:
            raise InvalidCurve("提升计划至少需要一条曲线")
        grid = items[0][0].times
        for curve, _ in items[1:]:
            if curve.times.shape != grid.shape or np.any(np.abs(curve.times - grid) > GRID_TOL):
                raise InvalidCurve("提升计划中的曲线必须共享同一时间网格")
        w = np.array([float(weight) for _, weight in items])
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise InvalidMeasure(f"曲线权重必须为正: {w.tolist()}")
        if abs(float(w.sum()) - 1.0) > tol:
            raise InvalidMeasure(f"曲线权重和 {w.sum()!r} 偏离 1")
        w.setflags(write=False)
        self.model = items[0][0].model
        self.times = grid
        self.curves: Tuple[SampledCurve, ...] = tuple(c for c, _ in items)
        self.weights = w

    def __len__(self) -> int:
        return len(self.curves)

    def __iter__(self):
        return iter(zip(self.curves, self.weights))

    def __repr__(self):
        return f"LiftedPlan(curves={len(self)}, grid={self.times.size})"

    def marginal_at_index(self, k: int) -> DiscreteMeasure:
        return DiscreteMeasure([c.points[k] for c in self.curves], self.weights)

    def marginal(self, t: float) -> DiscreteMeasure:
        return self.marginal_at_index(_grid_index(self.times, t))

    def to_path(self) -> 'MeasurePath':
        """各网格时间的边缘组成的测度路径（相邻可行性由曲线耦合自身见证）"""
        measures = [self.marginal_at_index(k) for k in range(self.times.size)]
        return MeasurePath(self.model, self.times, measures, check=False)

    def curvewise_action(self, e: Any) -> float:
        """∑_γ w_γ ∑_k Δ_k u_p(ℓ(γ_k, γ_{k+1})/Δ_k)"""
        from src.transport.utility import u_p

        dt = np.diff(self.times)
        total = 0.0
        for curve, weight in self:
            vals = u_p(e, np.asarray([curve.step_separation(k) for k in range(curve.intervals())]) / dt)
            if np.any(np.isneginf(vals)):
                return -math.inf
            total += weight * float(np.dot(dt, vals))
        return total

    def to_spec(self) -> Dict[str, Any]:
        return {
            'times': self.times.tolist(),
            'curves': [{**c.to_spec(), 'w': float(w)} for c, w in self],
        }


class MeasurePath:
    """网格上的因果测度路径

    Args:
        M: 时空模型
        times: 严格递增网格
        measures: 每个网格时间的测度
        check: 是否用最大流核验相邻测度的 ⪯ 关系
    """

    def __init__(self, M: SpacetimeModel, times: Sequence[float], measures: Sequence[DiscreteMeasure],
                 check: bool = True):
        grid = _check_grid(times)
        ms = list(measures)
        if len(ms) != grid.size:
            raise InvalidMeasure(f"测度数 {len(ms)} 与网格长度 {grid.size} 不符")
        for mu in ms:
            for x in mu.locations:
                M.validate_point(x)
        if check and len(ms) > 1:
            from src.transport.feasibility import feasible

            for k in range(len(ms) - 1):
                if not feasible(M, ms[k], ms[k + 1]).is_feasible:
                    raise InvalidMeasure(f"第 {k} 段不满足 μ_(t_k) ⪯ μ_(t_k+1)")
        self.model = M
        self.times = grid
        self.measures: Tuple[DiscreteMeasure, ...] = tuple(ms)

    def __len__(self) -> int:
        return len(self.measures)

    def __repr__(self):
        return f"MeasurePath(grid={self.times.size})"

    def at(self, t: float) -> DiscreteMeasure:
        return self.measures[_grid_index(self.times, t)]

    def interval(self, k: int) -> Tuple[float, float]:
        if not 0 <= k < len(self.measures) - 1:
            raise IndexError(f"区间下标越界: {k}")
        return float(self.times[k]), float(self.times[k + 1])

    def support_points(self) -> List[Any]:
        return [x for mu in self.measures for x in mu.locations]

    def emerald(self):
        """包含全部支撑的因果菱形 K（仅 Minkowski）"""
        from src.geometry.emerald import bounding_emerald

        return bounding_emerald(self.model, self.support_points())

    def to_spec(self) -> Dict[str, Any]:
        return {'times': self.times.tolist(), 'measures': [mu.to_spec() for mu in self.measures]}


def path_from_spec(spec: Dict[str, Any], M: SpacetimeModel, check: bool = True) -> MeasurePath:
    """{"times":[...],"measures":[...]} → MeasurePath"""
    return MeasurePath(M, spec['times'], [measure_from_spec(m, M) for m in spec['measures']], check=check)


def lifted_from_spec(spec: Dict[str, Any], M: SpacetimeModel) -> LiftedPlan:
    """{"times":[...],"curves":[{"points":[...],"w":...,"jumps"?:[...]}]} → LiftedPlan"""
    times = spec['times']
    curves = [(SampledCurve(M, times, c['points'], c.get('jumps', ())), float(c['w']))
              for c in spec['curves']]
    return LiftedPlan(curves)


# ========== 速度与作用量 ==========

def marginal(L: LiftedPlan, t: float) -> DiscreteMeasure:
    """(e_t)_# 𝛑：曲线权重在 t 处的推前，重合位置合并

    Raises:
        OffGridTime: t 不在网格上
    """
    return L.marginal(t)


def curve_speed(M: SpacetimeModel, gamma: SampledCurve, k: int) -> float:
    """ℓ(γ_{t_k}, γ_{t_{k+1}}) / (t_{k+1} − t_k)"""
    if not 0 <= k < gamma.intervals():
        raise IndexError(f"区间下标越界: {k}")
    dt = float(gamma.times[k + 1] - gamma.times[k])
    return gamma.step_separation(k) / dt


def path_speed(M: SpacetimeModel, P: MeasurePath, p: Union[float, Any], k: int) -> float:
    """ℓ_p(μ_{t_k}, μ_{t_{k+1}}) / Δ_k

    不可行时 ℓ_p = −∞，原样传播。
    """
    from src.transport.solver import solve_primal
    from src.transport.utility import Exponent

    e = p if isinstance(p, Exponent) else Exponent(p)
    s, t = P.interval(k)
    result = solve_primal(M, P.measures[k], P.measures[k + 1], e)
    if not result.feasible and result.ell_p == -math.inf:
        logger.warning(f"路径第 {k} 段不可行（{e}），速度为 −∞")
    return result.ell_p / (t - s)


def speed_profile(M: SpacetimeModel, P: MeasurePath, p: Union[float, Any]) -> List[float]:
    """每个区间的 path_speed"""
    return [path_speed(M, P, p, k) for k in range(len(P) - 1)]


def path_action(M: SpacetimeModel, P: MeasurePath, p: Union[float, Any],
                speeds: Optional[Sequence[float]] = None) -> float:
    """∑_k Δ_k · u_p(ℓ_p(μ_{t_k}, μ_{t_{k+1}}) / Δ_k)，任一项为 −∞ 则为 −∞

    Args:
        speeds: 已算好的 speed_profile，省去重复求解
    """
    from src.transport.utility import Exponent, u_p

    e = p if isinstance(p, Exponent) else Exponent(p)
    if len(P) < 2:
        return 0.0
    v = np.asarray(speeds if speeds is not None else speed_profile(M, P, e), dtype=float)
    terms = np.asarray(u_p(e, v), dtype=float)
    if np.any(np.isneginf(terms)):
        return -math.inf
    return float(np.dot(np.diff(P.times), terms))


# ========== 跳跃路径（瞬移示例） ==========

def _grid_from(grid: Union[int, Sequence[float]]) -> List[float]:
    times = uniform_grid(grid) if isinstance(grid, (int, np.integer)) else [float(t) for t in grid]
    if abs(times[0]) > GRID_TOL or abs(times[-1] - 1.0) > GRID_TOL:
        raise InvalidCurve("跳跃路径的网格必须从 0 开始、到 1 结束")
    return times


def teleport_path(M: SpacetimeModel, x: Any, y: Any, grid: Union[int, Sequence[float]]) -> MeasurePath:
    """μ_t = (1−t)δ_x + tδ_y，要求 x ≤ y"""
    times = _grid_from(grid)
    if M.time_separation(x, y) < 0:
        raise InvalidCurve("瞬移路径要求 x ≤ y")
    measures = []
    for t in times:
        if t <= GRID_TOL:
            measures.append(DiscreteMeasure.dirac(x))
        elif t >= 1.0 - GRID_TOL:
            measures.append(DiscreteMeasure.dirac(y))
        else:
            measures.append(DiscreteMeasure([x, y], [1.0 - t, t]))
    return MeasurePath(M, times, measures, check=False)


def teleport_lifting(M: SpacetimeModel, x: Any, y: Any, grid: Union[int, Sequence[float]]) -> LiftedPlan:
    """瞬移路径的离散提升

    第 i 条曲线在 t_0..t_i 停在 x，在 t_{i+1}.. 处于 y（跳跃区间 i），权重 Δ_i；
    于是 t_k 处落在 y 的质量为 ∑_{i<k} Δ_i = t_k。
    """
    times = _grid_from(grid)
    K = len(times) - 1
    curves = []
    for i in range(K):
        points = [x] * (i + 1) + [y] * (K - i)
        curves.append((SampledCurve(M, times, points, jumps=(i,)), times[i + 1] - times[i]))
    return LiftedPlan(curves)
