# -*- coding: utf-8 -*-
"""
运输单纯形（两阶段表格法）

只为允许边建列，禁止边（代价 −∞）在结构上不存在，无需 Big-M。
约束矩阵全幺模，主元恒为 ±1，表格保持整数。
进基/出基均按 Bland 规则取最小下标，结果在同一平台上逐位可复现。
"""
import logging
import time
from typing import List, Optional, Tuple

import numpy as np

logger = logging.getLogger(__name__)

PIVOT_TOL = 1e-9
PHASE1_TOL = 1e-10


class SimplexError(RuntimeError):
    """单纯形内部失败（不应在可行输入上出现）"""


class TransportationSimplex:
    """最大化 ∑ c_e x_e，s.t. 行和 = supply，列和 = demand，x ≥ 0

    实例在求解期间不可共享；不同实例可并发运行。

    Args:
        supply: 源权重 μ（长度 n）
        demand: 目标权重 ν（长度 m）
        edges: 允许边 (i, j) 列表
        costs: 对应代价（有限实数）
    """

    def __init__(self, supply: np.ndarray, demand: np.ndarray,
                 edges: List[Tuple[int, int]], costs: np.ndarray):
        self.n = len(supply)
        self.m = len(demand)
        self.edges = list(edges)
        self.costs = np.asarray(costs, dtype=float)
        self.rows = self.n + self.m
        self.num_edges = len(self.edges)

        E, R = self.num_edges, self.rows
        self.T = np.zeros((R, E + R))
        for col, (i, j) in enumerate(self.edges):
            self.T[i, col] = 1.0
            self.T[self.n + j, col] = 1.0
        self.T[:, E:] = np.eye(R)
        self.b = np.concatenate([np.asarray(supply, dtype=float), np.asarray(demand, dtype=float)])
        self.basis = list(range(E, E + R))
        self.pivots = 0
        self.reduced_tol = 1e-12 * max(1.0, float(np.max(np.abs(self.costs))) if E else 1.0)

    # ------------------------------------------------------------------
    def _pivot(self, row: int, col: int, d: np.ndarray) -> None:
        piv = self.T[row, col]
        self.T[row] /= piv
        self.b[row] /= piv
        column = self.T[:, col].copy()
        column[row] = 0.0
        nz = np.flatnonzero(column)
        if nz.size:
            self.T[nz] -= np.outer(column[nz], self.T[row])
            self.b[nz] -= column[nz] * self.b[row]
        d -= d[col] * self.T[row]
        self.basis[row] = col
        self.pivots += 1

    def _leaving_row(self, col: int) -> Optional[int]:
        """最小比值检验，并列时取基变量下标最小者（Bland）"""
        column = self.T[:, col]
        best_row: Optional[int] = None
        best_ratio = np.inf
        for r in np.flatnonzero(column > PIVOT_TOL):
            ratio = max(self.b[r], 0.0) / column[r]
            if best_row is None or ratio < best_ratio - 1e-15 or (
                    abs(ratio - best_ratio) <= 1e-15 and self.basis[r] < self.basis[best_row]):
                best_row = int(r)
                best_ratio = ratio
        return best_row

    def _run(self, d: np.ndarray, allowed: np.ndarray, tol: float) -> None:
        while True:
            candidates = np.flatnonzero(allowed & (d < -tol))
            if candidates.size == 0:
                return
            col = int(candidates[0])
            row = self._leaving_row(col)
            if row is None:
                raise SimplexError("运输问题无界（有界可行域上不应发生）")
            self._pivot(row, col, d)

    # ------------------------------------------------------------------
    def solve(self) -> Tuple[np.ndarray, np.ndarray]:
        """求解

        Returns:
            (x, y)：边上的最优流量；对偶向量 y（长度 n+m，对应最小化 −c 的影子价格）

        Raises:
            SimplexError: 第一阶段目标不为零（输入不可行）
        """
        start = time.perf_counter()
        E, R = self.num_edges, self.rows
        is_artificial = np.zeros(E + R, dtype=bool)
        is_artificial[E:] = True

        # 第一阶段：min ∑ a_r
        w1 = is_artificial.astype(float)
        d = w1 - w1[self.basis] @ self.T
        self._run(d, ~is_artificial, PIVOT_TOL * 1e-3)
        infeasibility = float(self.b[[r for r, v in enumerate(self.basis) if v >= E]].sum()) \
            if any(v >= E for v in self.basis) else 0.0
        if infeasibility > PHASE1_TOL:
            raise SimplexError(f"第一阶段残余 {infeasibility:.3e}，输入不可行")

        # 把仍在基中的人工变量换出；换不出的是冗余行，保持零值
        for r in range(R):
            if self.basis[r] < E:
                continue
            row = self.T[r, :E]
            nz = np.flatnonzero(np.abs(row) > PIVOT_TOL)
            if nz.size:
                self._pivot(r, int(nz[0]), d)

        # 第二阶段：min −c，人工变量禁止进基
        w2 = np.concatenate([-self.costs, np.zeros(R)])
        d = w2 - w2[self.basis] @ self.T
        self._run(d, ~is_artificial, self.reduced_tol)

        x = np.zeros(E)
        for r, v in enumerate(self.basis):
            if v < E:
                x[v] = self.b[r]
        x[np.abs(x) < 1e-15] = 0.0
        if np.any(x < 0):
            raise SimplexError(f"得到负流量 {x.min():.3e}")
        y = w2[self.basis] @ self.T[:, E:]
        logger.debug(f"单纯形 {self.n}x{self.m}（{E} 条边）: {self.pivots} 次主元, "
                     f"耗时 {time.perf_counter() - start:.4f}s")
        return x, y
