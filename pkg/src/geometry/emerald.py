# -*- coding: utf-8 -*-
"""
因果菱形与翡翠集

在 Minkowski 中用轴对齐的因果菱形 J(lo, hi) 充当紧致因果凸邻域。
"""
import math
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy as np

from src.geometry.spacetime import Event, Minkowski, SpacetimeModel


@dataclass(frozen=True)
class Diamond:
    """因果菱形 J(lo, hi) = J⁺(lo) ∩ J⁻(hi)"""
    lo: Event
    hi: Event

    def contains(self, x: Event) -> bool:
        """lo ≤ x ≤ hi（闭集成员）"""
        M = Minkowski(self.lo.dim)
        return M.time_separation(self.lo, x) >= 0 and M.time_separation(x, self.hi) >= 0

    def contains_interior(self, x: Event) -> bool:
        """lo ≪ x ≪ hi（内部成员）"""
        M = Minkowski(self.lo.dim)
        return M.time_separation(self.lo, x) > 0 and M.time_separation(x, self.hi) > 0

    @property
    def height(self) -> float:
        return self.hi.t - self.lo.t


def bounding_emerald(M: SpacetimeModel, points: Iterable[Any], margin: float = 1.0) -> Diamond:
    """包含全部点、时间方向留有严格余量的因果菱形

    以空间包围盒中心 c 为轴：lo.t = min(t_p − |x_p − c|) − margin，
    hi.t = max(t_p + |x_p − c|) + margin，于是每个输入点都满足 lo ≪ p ≪ hi。

    Args:
        M: Minkowski 模型
        points: 非空点集
        margin: 时间余量 δ > 0

    Returns:
        Diamond
    """
    M.require_geometry('bounding_emerald')
    assert isinstance(M, Minkowski)
    if margin <= 0:
        raise ValueError(f"余量必须为正: {margin}")
    X = M.coords(list(points))
    if X.shape[0] == 0:
        raise ValueError("点集不能为空")
    spatial = X[:, 1:]
    center = 0.5 * (spatial.min(axis=0) + spatial.max(axis=0))
    radius = np.linalg.norm(spatial - center, axis=1)
    lo_t = float(np.min(X[:, 0] - radius)) - margin
    hi_t = float(np.max(X[:, 0] + radius)) + margin
    return Diamond(Event((lo_t, *center)), Event((hi_t, *center)))


def euclidean_length_bound(M: SpacetimeModel, diamond: Diamond) -> float:
    """菱形内任一因果曲线的欧氏长度上界 √2·(hi.t − lo.t)"""
    M.require_geometry('euclidean_length_bound')
    return math.sqrt(2.0) * max(diamond.height, 0.0)


def polyline_length(points: Sequence[Event]) -> float:
    """折线的欧氏长度"""
    if len(points) < 2:
        return 0.0
    X = np.array([p.coords for p in points], dtype=float)
    return float(np.linalg.norm(np.diff(X, axis=0), axis=1).sum())


def emerald_contains(M: SpacetimeModel, sources: Sequence[Any], targets: Sequence[Any], z: Any) -> bool:
    """z ∈ J(A, B)：存在 a ∈ A 与 b ∈ B 使 a ≤ z ≤ b"""
    before = M.ell_matrix(sources, [z])[:, 0]
    after = M.ell_matrix([z], targets)[0, :]
    return bool((before >= 0).any() and (after >= 0).any())
