# -*- coding: utf-8 -*-
"""
因果耦合可行性（μ ⪯ ν 判定）

在二部图上求最大流：源点 → 源原子（容量 μ_i），目标原子 → 汇点（容量 ν_j），
因果相关的原子对之间连无容量限制的边。最大流为 1 即可行，流本身就是见证计划；
否则残量网络中从源点可达的源原子集合 A 满足 ν(N(A)) < μ(A)。
"""
import logging
import time
from dataclasses import dataclass, field
from typing import Any, List, Optional, Union

import networkx as nx
import numpy as np
from networkx.algorithms import flow as nx_flow

from src.geometry.spacetime import SpacetimeModel
from src.measures.discrete import CausalPlan, DiscreteMeasure

logger = logging.getLogger(__name__)

FLOW_TOL = 1e-10
RESIDUAL_TOL = 1e-12

_SOURCE = 's'
_SINK = 't'


@dataclass(frozen=True)
class Feasible:
    """可行：附带见证计划"""
    witness: CausalPlan
    flow_value: float = 1.0

    @property
    def is_feasible(self) -> bool:
        return True


@dataclass(frozen=True)
class Infeasible:
    """不可行：附带违例源子集 A（下标）及 μ(A)、ν(N(A))"""
    cut: List[int]
    cut_locations: List[Any] = field(default_factory=list)
    cut_mass: float = 0.0
    neighbor_mass: float = 0.0
    flow_value: float = 0.0
    strict: bool = False

    @property
    def is_feasible(self) -> bool:
        return False


FeasibilityResult = Union[Feasible, Infeasible]


def admissible_edges(ell: np.ndarray, strict: bool = False) -> np.ndarray:
    """允许的边：ℓ ≥ 0，strict 时 ℓ > 0"""
    return ell > 0 if strict else ell >= 0


def build_flow_graph(mu: DiscreteMeasure, nu: DiscreteMeasure, edges: np.ndarray) -> nx.DiGraph:
    """构造二部流网络，中间边不设 capacity 属性（networkx 视为无穷）"""
    G = nx.DiGraph()
    G.add_node(_SOURCE)
    G.add_node(_SINK)
    for i, w in enumerate(mu.weights):
        G.add_edge(_SOURCE, ('x', i), capacity=float(w))
    for j, w in enumerate(nu.weights):
        G.add_edge(('y', j), _SINK, capacity=float(w))
    for i, j in np.argwhere(edges):
        G.add_edge(('x', int(i)), ('y', int(j)))
    return G


def _residual_reachable(R: nx.DiGraph) -> set:
    """残量网络中从源点出发、沿残量 > RESIDUAL_TOL 的边可达的节点"""
    seen = {_SOURCE}
    stack = [_SOURCE]
    while stack:
        u = stack.pop()
        for v, attr in R[u].items():
            if v in seen:
                continue
            if attr['capacity'] - attr['flow'] > RESIDUAL_TOL:
                seen.add(v)
                stack.append(v)
    return seen


def feasible(M: SpacetimeModel, mu: DiscreteMeasure, nu: DiscreteMeasure,
             strict: bool = False, ell: Optional[np.ndarray] = None) -> FeasibilityResult:
    """判定 Π_≤(μ, ν) 是否非空

    Args:
        M: 时空模型
        mu: 源测度
        nu: 目标测度
        strict: 只允许类时边（p < 0 的问题使用）
        ell: 预先算好的 ℓ 矩阵

    Returns:
        Feasible(witness) 或 Infeasible(cut)
    """
    start = time.perf_counter()
    if ell is None:
        ell = M.ell_matrix(mu.locations, nu.locations)
    edges = admissible_edges(ell, strict)
    G = build_flow_graph(mu, nu, edges)
    R = nx_flow.edmonds_karp(G, _SOURCE, _SINK)
    value = float(R.graph['flow_value'])
    logger.debug(f"最大流 {len(mu)}x{len(nu)}: 值 {value:.12f}, 耗时 {time.perf_counter() - start:.4f}s")

    if value >= 1.0 - FLOW_TOL:
        n, m = len(mu), len(nu)
        P = np.zeros((n, m))
        for i, j in np.argwhere(edges):
            P[i, j] = max(R[('x', int(i))][('y', int(j))]['flow'], 0.0)
        witness = CausalPlan(M, mu, nu, P, tol=10 * FLOW_TOL, ell=ell)
        return Feasible(witness, value)

    reachable = _residual_reachable(R)
    cut = sorted(i for i in range(len(mu)) if ('x', i) in reachable)
    neighbors = sorted({int(j) for i in cut for j in np.flatnonzero(edges[i])})
    cut_mass = float(mu.weights[cut].sum()) if cut else 0.0
    neighbor_mass = float(nu.weights[neighbors].sum()) if neighbors else 0.0
    logger.info(f"不可行: 违例源子集 {cut}, μ(A)={cut_mass:.6g} > ν(N(A))={neighbor_mass:.6g}")
    return Infeasible(
        cut=cut,
        cut_locations=[mu.locations[i] for i in cut],
        cut_mass=cut_mass,
        neighbor_mass=neighbor_mass,
        flow_value=value,
        strict=strict,
    )
