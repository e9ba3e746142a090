# -*- coding: utf-8 -*-
"""
测地位移插值与重心速度场

geodesic_path：计划的每个正元素对应一条直线曲线，权重 π_ij。
barycentric_velocity：每个网格时间、每个有质量的位置上，取经过该处所有曲线速度的质量加权平均。
"""
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.errors import DomainMismatch, InvalidCurve, InvalidVelocity
from src.geometry.emerald import emerald_contains
from src.geometry.spacetime import CausalVector, Event, Minkowski, SpacetimeModel
from src.measures.discrete import CausalPlan, DiscreteMeasure
from src.measures.paths import LiftedPlan, MeasurePath, SampledCurve, uniform_grid

logger = logging.getLogger(__name__)

CAUSAL_TOL = 1e-12
PLAN_WEIGHT_TOL = 1e-9


def _times(grid: Union[int, Sequence[float]]) -> List[float]:
    if isinstance(grid, (int, np.integer)):
        return uniform_grid(int(grid))
    times = [float(t) for t in grid]
    if len(times) < 2:
        raise InvalidCurve("网格至少需要 2 个点")
    return times


def _is_causal_rows(V: np.ndarray, tol: float = CAUSAL_TOL) -> np.ndarray:
    """逐行判断 v0 ≥ |v⃗|（容许 tol·max(1,|v0|) 的舍入）"""
    spatial = np.linalg.norm(V[:, 1:], axis=1)
    return V[:, 0] >= spatial - tol * np.maximum(1.0, np.abs(V[:, 0]))


class VelocitySeries:
    """每个网格时间上、定义在原子位置上的未来因果向量场

    Args:
        M: Minkowski 模型
        times: 时间网格
        fields: 每个时间一个 {位置: 向量分量} 字典

    Raises:
        InvalidVelocity: 出现非未来因果的向量
    """

    def __init__(self, M: SpacetimeModel, times: Sequence[float],
                 fields: Sequence[Dict[Any, Any]]):
        M.require_geometry('VelocitySeries')
        grid = np.asarray(times, dtype=float).reshape(-1)
        if len(fields) != grid.size:
            raise InvalidVelocity(f"速度场个数 {len(fields)} 与网格长度 {grid.size} 不符")
        self.model = M
        self.times = grid
        self._locations: List[Tuple[Event, ...]] = []
        self._vectors: List[np.ndarray] = []
        self._index: List[Dict[Event, int]] = []
        for k, fmap in enumerate(fields):
            locs = tuple(M.validate_point(x) for x in fmap)
            vecs = np.array([v.components if isinstance(v, CausalVector) else tuple(v)
                             for v in fmap.values()], dtype=float).reshape(len(locs), M.dim + 1)
            if vecs.size and not np.all(np.isfinite(vecs)):
                raise InvalidVelocity(f"t={grid[k]:g} 处速度含非有限分量")
            bad = ~_is_causal_rows(vecs)
            if bad.any():
                i = int(np.flatnonzero(bad)[0])
                raise InvalidVelocity(f"t={grid[k]:g} 处 {locs[i].coords} 的速度 {vecs[i].tolist()} 不是未来因果的")
            vecs.setflags(write=False)
            self._locations.append(locs)
            self._vectors.append(vecs)
            self._index.append({x: i for i, x in enumerate(locs)})

    def __len__(self) -> int:
        return self.times.size

    def __repr__(self):
        return f"VelocitySeries(grid={self.times.size})"

    @classmethod
    def zero(cls, M: SpacetimeModel, P: MeasurePath) -> 'VelocitySeries':
        """v ≡ 0"""
        zero = tuple(0.0 for _ in range(M.dim + 1))
        return cls(M, P.times, [{x: zero for x in mu.locations} for mu in P.measures])

    def locations(self, k: int) -> Tuple[Event, ...]:
        return self._locations[k]

    def vectors(self, k: int) -> np.ndarray:
        return self._vectors[k]

    def vector_at(self, k: int, x: Any) -> CausalVector:
        i = self._index[k].get(x)
        if i is None:
            raise DomainMismatch(f"t={self.times[k]:g} 处 {x!r} 上没有速度")
        return CausalVector(tuple(self._vectors[k][i]), base=x)

    def aligned(self, k: int, mu: DiscreteMeasure) -> np.ndarray:
        """按 mu 的原子顺序取速度数组 (len(mu), n+1)

        Raises:
            DomainMismatch: 某个原子上没有速度
        """
        rows = []
        index = self._index[k]
        for x in mu.locations:
            i = index.get(x)
            if i is None:
                raise DomainMismatch(f"t={self.times[k]:g} 处原子 {x!r} 不在速度场定义域内")
            rows.append(i)
        return self._vectors[k][rows]

    def scaled(self, lam: float) -> 'VelocitySeries':
        """整体乘以 λ ∈ [0,1]（阻尼），仍为因果场"""
        if not 0.0 <= lam <= 1.0:
            raise InvalidVelocity(f"阻尼系数必须在 [0,1]: {lam}")
        fields = [{x: tuple(lam * v) for x, v in zip(locs, vecs)}
                  for locs, vecs in zip(self._locations, self._vectors)]
        return VelocitySeries(self.model, self.times, fields)

    def to_spec(self) -> Dict[str, Any]:
        return {
            'times': self.times.tolist(),
            'fields': [[{'x': list(x.coords), 'v': v.tolist()} for x, v in zip(locs, vecs)]
                       for locs, vecs in zip(self._locations, self._vectors)],
        }


def velocities_from_spec(spec: Dict[str, Any], M: SpacetimeModel) -> VelocitySeries:
    """{"times":[...],"fields":[[{"x":[...],"v":[...]},...],...]} → VelocitySeries"""
    fields = [{M.validate_point(item['x']): tuple(float(c) for c in item['v']) for item in layer}
              for layer in spec['fields']]
    return VelocitySeries(M, spec['times'], fields)


def geodesic_path(M: SpacetimeModel, mu0: DiscreteMeasure, mu1: DiscreteMeasure, plan: CausalPlan,
                  grid: Union[int, Sequence[float]]) -> Tuple[MeasurePath, LiftedPlan]:
    """位移插值：每个 π_ij > 0 对应曲线 t ↦ x_i + t(y_j − x_i)

    Args:
        grid: 网格点数或显式网格

    Returns:
        (MeasurePath, LiftedPlan)

    Raises:
        NotCausallyRelated: 计划支撑上出现非因果点对（合法 CausalPlan 不会发生）
    """
    M.require_geometry('geodesic_path')
    assert isinstance(M, Minkowski)
    times = _times(grid)
    support = plan.support()
    total = sum(w for _, _, w in support)
    if abs(total - 1.0) > PLAN_WEIGHT_TOL:
        raise InvalidCurve(f"计划总质量 {total!r} 偏离 1")
    curves = []
    for i, j, w in support:
        x, y = mu0.locations[i], mu1.locations[j]
        points = [M.geodesic_point(x, y, t) for t in times]
        curves.append((SampledCurve(M, times, points), w / total))
    lifted = LiftedPlan(curves)
    path = lifted.to_path()
    logger.debug(f"测地插值: {len(curves)} 条曲线, {len(times)} 个网格点")
    return path, lifted


def merge_counts(L: LiftedPlan) -> List[int]:
    """每个网格时间上重合合并掉的曲线数（曲线数 − 原子数）"""
    return [len(L) - len(L.marginal_at_index(k)) for k in range(L.times.size)]


def support_contained(M: SpacetimeModel, mu0: DiscreteMeasure, mu1: DiscreteMeasure,
                      P: MeasurePath) -> bool:
    """每个插值原子都落在 J(spt μ0, spt μ1) 中"""
    sources, targets = list(mu0.locations), list(mu1.locations)
    return all(emerald_contains(M, sources, targets, z) for mu in P.measures for z in mu.locations)


def curve_velocities(L: LiftedPlan, k: int, zero_jumps: bool = False) -> np.ndarray:
    """各曲线在 t_k 的速度：k < K 用前向差分，k = K 用后向差分

    zero_jumps=True 时跳跃区间上的速度记为 0（不可微处不计入 D_t）。
    """
    K = L.times.size - 1
    seg = k if k < K else K - 1
    dt = float(L.times[seg + 1] - L.times[seg])
    rows = []
    for curve in L.curves:
        if zero_jumps and seg in curve.jumps:
            rows.append(np.zeros(len(curve.points[0].coords)))
            continue
        a = np.asarray(curve.points[seg].coords, dtype=float)
        b = np.asarray(curve.points[seg + 1].coords, dtype=float)
        rows.append((b - a) / dt)
    return np.vstack(rows)


def barycentric_velocity(M: SpacetimeModel, L: LiftedPlan, zero_jumps: bool = False) -> VelocitySeries:
    """重心速度场 v_t(x) = ∑_{γ_t = x} w_γ γ̇_t / ∑_{γ_t = x} w_γ

    Args:
        M: Minkowski 模型
        L: 提升计划（网格 ≥ 2 点）
        zero_jumps: 跳跃区间速度取 0
    """
    M.require_geometry('barycentric_velocity')
    if L.times.size < 2:
        raise InvalidCurve("重心速度需要至少 2 个网格点")
    fields: List[Dict[Any, Tuple[float, ...]]] = []
    merged_sites = 0
    for k in range(L.times.size):
        V = curve_velocities(L, k, zero_jumps)
        sums: Dict[Any, np.ndarray] = {}
        mass: Dict[Any, float] = {}
        for curve, w, v in zip(L.curves, L.weights, V):
            x = curve.points[k]
            if x in sums:
                sums[x] = sums[x] + w * v
                mass[x] += float(w)
                merged_sites += 1
            else:
                sums[x] = w * v
                mass[x] = float(w)
        fields.append({x: tuple(sums[x] / mass[x]) for x in sums})
    if merged_sites:
        logger.debug(f"重心速度: {merged_sites} 处曲线重合，速度取加权平均")
    return VelocitySeries(M, L.times, fields)


def curvewise_integrands(M: Minkowski, L: LiftedPlan, e: Any, zero_jumps: bool = False,
                         scale: float = 1.0) -> np.ndarray:
    """C_k = ∑_γ w_γ u_p(‖λ·γ̇_{t_k}‖)，与 barycentric_velocity 同一差分约定"""
    from src.dynamics.benamou_brenier import clamped_norms
    from src.transport.utility import u_p

    out = np.empty(L.times.size)
    for k in range(L.times.size):
        V = scale * curve_velocities(L, k, zero_jumps)
        vals = np.asarray(u_p(e, clamped_norms(V)), dtype=float)
        out[k] = -np.inf if np.any(np.isneginf(vals)) else float(np.dot(L.weights, vals))
    return out


def crossing_lifting(M: Optional[Minkowski] = None, grid: int = 3) -> LiftedPlan:
    """两条在 t = ½ 相遇于原点的类光曲线，速度 (1,1) 与 (1,−1)，权重各半"""
    M = M or Minkowski(1)
    times = _times(grid)
    up = [Event.of(t - 0.5, t - 0.5) for t in times]
    down = [Event.of(t - 0.5, 0.5 - t) for t in times]
    return LiftedPlan([(SampledCurve(M, times, up), 0.5), (SampledCurve(M, times, down), 0.5)])
