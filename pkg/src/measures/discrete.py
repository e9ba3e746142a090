# -*- coding: utf-8 -*-
"""
离散测度与因果耦合

DiscreteMeasure：有限个带正权重的原子，权重和为 1，重合位置在构造时精确合并。
CausalPlan：源/目标测度之间的耦合矩阵，正元素只允许落在因果相关的点对上。
"""
import logging
import math
from typing import Any, Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from src.core.errors import InvalidMeasure, InvalidPlan
from src.core.utils import decode_real
from src.geometry.spacetime import Event, SpacetimeModel

logger = logging.getLogger(__name__)

WEIGHT_SUM_TOL = 1e-12
MARGINAL_TOL = 1e-10


class DiscreteMeasure:
    """离散概率测度

    Args:
        locations: 原子位置（Minkowski 中为 Event，有限因果空间中为标签）
        weights: 对应权重，必须全部为正
        tol: 权重和的容差
    """

    def __init__(self, locations: Sequence[Any], weights: Sequence[float], tol: float = WEIGHT_SUM_TOL):
        locs = list(locations)
        w = np.asarray(weights, dtype=float).reshape(-1)
        if len(locs) != w.shape[0]:
            raise InvalidMeasure(f"原子数 {len(locs)} 与权重数 {w.shape[0]} 不符")
        if len(locs) == 0:
            raise InvalidMeasure("测度至少需要一个原子")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise InvalidMeasure(f"权重必须为正的有限数: {w.tolist()}")
        total = float(w.sum())
        if abs(total - 1.0) > tol:
            raise InvalidMeasure(f"权重和 {total!r} 偏离 1 超过 {tol}")

        # 精确合并重合原子，保持首次出现的顺序
        merged: Dict[Hashable, int] = {}
        out_locs: List[Any] = []
        out_w: List[float] = []
        for loc, weight in zip(locs, w):
            key = loc
            if key in merged:
                out_w[merged[key]] += float(weight)
            else:
                merged[key] = len(out_locs)
                out_locs.append(loc)
                out_w.append(float(weight))
        if len(out_locs) < len(locs):
            logger.debug(f"合并了 {len(locs) - len(out_locs)} 个重合原子")

        self._locations: Tuple[Any, ...] = tuple(out_locs)
        self._weights = np.asarray(out_w, dtype=float)
        self._weights.setflags(write=False)
        self._index = merged
        self.merged_count = len(locs) - len(out_locs)

    @classmethod
    def dirac(cls, x: Any) -> 'DiscreteMeasure':
        return cls([x], [1.0])

    @property
    def locations(self) -> Tuple[Any, ...]:
        return self._locations

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    def __len__(self) -> int:
        return len(self._locations)

    def __iter__(self):
        return iter(zip(self._locations, self._weights))

    def __repr__(self):
        return f"DiscreteMeasure(atoms={len(self)})"

    def __eq__(self, other):
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return dict(zip(self._locations, self._weights.tolist())) == dict(zip(other._locations, other._weights.tolist()))

    def index_of(self, x: Any) -> int:
        return self._index[x]

    def weight_of(self, x: Any) -> float:
        """x 处的质量，不在支撑上返回 0"""
        i = self._index.get(x)
        return 0.0 if i is None else float(self._weights[i])

    def integrate(self, values: Sequence[float]) -> float:
        """∫ f dμ，values 与原子同序"""
        v = np.asarray(values, dtype=float)
        mask = self._weights > 0
        if np.any(np.isneginf(v[mask])):
            return -math.inf
        return float(np.dot(self._weights, v))

    def to_spec(self) -> Dict[str, Any]:
        atoms = []
        for loc, w in self:
            x = list(loc.coords) if isinstance(loc, Event) else loc
            atoms.append({'x': x, 'w': float(w)})
        return {'atoms': atoms}


def measure_from_spec(spec: Dict[str, Any], M: SpacetimeModel) -> DiscreteMeasure:
    """{"atoms":[{"x":[...],"w":0.5},...]} → DiscreteMeasure"""
    atoms = spec.get('atoms')
    if not isinstance(atoms, list):
        raise InvalidMeasure("测度需要 atoms 列表")
    locs = [M.validate_point(a['x']) for a in atoms]
    weights = [decode_real(a['w']) for a in atoms]
    return DiscreteMeasure(locs, weights)


class CausalPlan:
    """因果耦合 π ∈ Π_≤(μ, ν)

    Args:
        M: 时空模型
        source: 源测度 μ（行）
        target: 目标测度 ν（列）
        matrix: 非负矩阵
        tol: 边缘容差
    """

    def __init__(self, M: SpacetimeModel, source: DiscreteMeasure, target: DiscreteMeasure,
                 matrix: Any, tol: float = MARGINAL_TOL, ell: Optional[np.ndarray] = None):
        P = np.array(matrix, dtype=float)
        if P.shape != (len(source), len(target)):
            raise InvalidPlan(f"计划形状 {P.shape} 与测度 ({len(source)}, {len(target)}) 不符")
        if not np.all(np.isfinite(P)) or np.any(P < 0):
            raise InvalidPlan("计划元素必须为非负有限数")
        row_err = np.abs(P.sum(axis=1) - source.weights).max()
        col_err = np.abs(P.sum(axis=0) - target.weights).max()
        if row_err > tol or col_err > tol:
            raise InvalidPlan(f"边缘不符: 行误差 {row_err:.3e}, 列误差 {col_err:.3e}")
        if ell is None:
            ell = M.ell_matrix(source.locations, target.locations)
        bad = (P > 0) & (ell < 0)
        if bad.any():
            i, j = np.argwhere(bad)[0]
            raise InvalidPlan(f"计划在非因果点对 ({i}, {j}) 上有质量 {P[i, j]}")
        P.setflags(write=False)
        self.model = M
        self.source = source
        self.target = target
        self.matrix = P
        self.ell = ell

    def support(self) -> List[Tuple[int, int, float]]:
        """正元素列表 (i, j, π_ij)，按行优先顺序"""
        idx = np.argwhere(self.matrix > 0)
        return [(int(i), int(j), float(self.matrix[i, j])) for i, j in idx]

    def cost(self, c: np.ndarray) -> float:
        """∑ π_ij c_ij，只在支撑上求和（支撑外 −∞ 不参与）"""
        mask = self.matrix > 0
        vals = c[mask]
        if np.any(np.isneginf(vals)):
            return -math.inf
        return float(np.dot(self.matrix[mask], vals))

    def __repr__(self):
        return f"CausalPlan({self.matrix.shape[0]}x{self.matrix.shape[1]}, support={int((self.matrix > 0).sum())})"
