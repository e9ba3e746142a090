# -*- coding: utf-8 -*-
"""
暴力预言机

用于交叉核验精确实现：
- 两段折线曲线最大化，确认 Minkowski ℓ 的闭式解
- 单位双曲面网格，确认对偶范数闭式解
- 运输多面体顶点枚举（小规模）
- scipy.optimize.linprog 的可行性 LP
"""
import itertools
import logging
import math
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from src.geometry.spacetime import Event, _lorentz_length

logger = logging.getLogger(__name__)


def curve_max_time_separation(x: Event, y: Event, samples: int = 41) -> float:
    """在经过中间点 z 的两段因果折线上最大化 Lorentz 长度

    z 取遍 J(x, y) 中的一张网格（含中点），返回最大长度；x ≰ y 时为 −∞。
    """
    a, b = x.as_array(), y.as_array()
    dt = b[0] - a[0]
    dx = float(np.linalg.norm(b[1:] - a[1:]))
    if dt < dx:
        return -math.inf
    if dt == 0:
        return 0.0
    best = 0.0
    for s in np.linspace(0.0, 1.0, samples):
        for w in np.linspace(-1.0, 1.0, samples):
            # 中间点：时间 a0 + s·dt，空间沿 b−a 方向偏移 w 倍的可达半径
            z_t = a[0] + s * dt
            center = a[1:] + s * (b[1:] - a[1:])
            direction = b[1:] - a[1:]
            norm = np.linalg.norm(direction)
            if norm > 0:
                direction = direction / norm
            else:
                direction = np.zeros_like(direction)
                direction[0] = 1.0
            reach = min(s * dt, (1 - s) * dt)
            z = np.concatenate(([z_t], center + w * reach * direction))
            l1 = _lorentz_length(z[0] - a[0], np.linalg.norm(z[1:] - a[1:]))
            l2 = _lorentz_length(b[0] - z[0], np.linalg.norm(b[1:] - z[1:]))
            if np.isfinite(l1) and np.isfinite(l2):
                best = max(best, float(l1 + l2))
    return best


def hyperboloid_dual_norm(omega: Sequence[float], grid: int = 4001, rapidity: float = 8.0) -> float:
    """在单位双曲面 v = (cosh θ, sinh θ·u) 上网格最小化 ω(v)

    1+1 维时 u = ±1；高维时 u 取 −ω⃗/|ω⃗|（最小化方向），退化为一维网格。
    """
    w = np.asarray(omega, dtype=float)
    w0, ws = w[0], w[1:]
    norm_s = float(np.linalg.norm(ws))
    theta = np.linspace(0.0, rapidity, grid)
    # ω(v) = w0 cosh θ − |ω⃗| sinh θ 在 u = −ω⃗/|ω⃗| 时最小
    vals = w0 * np.cosh(theta) - norm_s * np.sinh(theta)
    best = float(vals.min())
    # 细化：在最优格点附近再取一次
    k = int(np.argmin(vals))
    lo = theta[max(k - 1, 0)]
    hi = theta[min(k + 1, grid - 1)]
    fine = np.linspace(lo, hi, grid)
    best = min(best, float((w0 * np.cosh(fine) - norm_s * np.sinh(fine)).min()))
    return max(best, 0.0)


def enumerate_vertices(supply: np.ndarray, demand: np.ndarray, costs: np.ndarray) -> float:
    """枚举运输多面体顶点，返回 max ∑ c_ij x_ij（−∞ 边不可用）

    只适合 ≤ 4×4：对每个大小为 rank 的允许列子集求解等式组，
    保留非负且残差很小的解。
    """
    n, m = costs.shape
    edges = [(i, j) for i in range(n) for j in range(m) if np.isfinite(costs[i, j])]
    if not edges:
        return -math.inf
    A = np.zeros((n + m, len(edges)))
    for k, (i, j) in enumerate(edges):
        A[i, k] = 1.0
        A[n + j, k] = 1.0
    b = np.concatenate([supply, demand])
    # 允许边图不连通时 rank < n+m−1，基的大小取 A 的秩
    rank = int(np.linalg.matrix_rank(A))
    best = -math.inf
    for cols in itertools.combinations(range(len(edges)), rank):
        sub = A[:, cols]
        sol, _, sub_rank, _ = np.linalg.lstsq(sub, b, rcond=None)
        if sub_rank < len(cols):
            continue
        if np.abs(sub @ sol - b).max() > 1e-10 or sol.min() < -1e-12:
            continue
        value = float(sum(costs[edges[c]] * max(s, 0.0) for c, s in zip(cols, sol)))
        best = max(best, value)
    return best


def lp_feasible(ell: np.ndarray, supply: np.ndarray, demand: np.ndarray,
                strict: bool = False) -> bool:
    """用 linprog 判断是否存在支撑在允许边上的耦合"""
    allowed = ell > 0 if strict else ell >= 0
    n, m = allowed.shape
    edges = [(i, j) for i in range(n) for j in range(m) if allowed[i, j]]
    if not edges:
        return False
    A = np.zeros((n + m, len(edges)))
    for k, (i, j) in enumerate(edges):
        A[i, k] = 1.0
        A[n + j, k] = 1.0
    b = np.concatenate([supply, demand])
    res = linprog(np.zeros(len(edges)), A_eq=A, b_eq=b, bounds=(0, None), method='highs')
    return bool(res.status == 0)


def brute_force_optimum(costs: np.ndarray, supply: np.ndarray, demand: np.ndarray,
                        max_size: int = 4) -> Optional[float]:
    """n, m ≤ max_size 时返回顶点枚举最优值，否则 None"""
    n, m = costs.shape
    if n > max_size or m > max_size:
        return None
    return enumerate_vertices(supply, demand, costs)
