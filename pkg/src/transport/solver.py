# -*- coding: utf-8 -*-
"""
静态问题求解：u_p(ℓ_p(μ,ν)) = sup_π ∑ π_ij u_p(ℓ(x_i, y_j))

先用最大流判定可行性（p < 0 时在严格关系上判定），
可行时在允许边子图上跑运输单纯形，对偶势由最优基给出。
"""
import logging
import math
import time
from dataclasses import dataclass
from typing import Any, Dict, Optional, Union

import numpy as np

from src.geometry.spacetime import SpacetimeModel
from src.measures.discrete import CausalPlan, DiscreteMeasure
from src.transport.feasibility import Infeasible, feasible
from src.transport.simplex import TransportationSimplex
from src.transport.utility import Exponent, u_p, u_p_inverse

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PotentialPair:
    """对偶势 (φ, ψ)，按源/目标原子下标存储"""
    phi: np.ndarray
    psi: np.ndarray

    def dual_value(self, mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
        """∫ψ dν − ∫φ dμ"""
        return float(np.dot(nu.weights, self.psi) - np.dot(mu.weights, self.phi))

    def slack(self, costs: np.ndarray) -> np.ndarray:
        """ψ_j − φ_i − c_ij；禁止边（c = −∞）处为 +∞"""
        with np.errstate(invalid='ignore'):
            return self.psi[None, :] - self.phi[:, None] - costs


@dataclass(frozen=True)
class SolveResult:
    """静态问题结果

    Attributes:
        value: 最优 u_p(ℓ_p)，不可行时为 −∞
        ell_p: 由 value 反解的 ℓ_p
        plan: 最优计划，或 Infeasible
        potentials: 对偶势，不可行时为 None
        costs: 代价矩阵 c_ij = u_p(ℓ_ij)
        exponent: 指数
    """
    value: float
    ell_p: float
    plan: Union[CausalPlan, Infeasible]
    potentials: Optional[PotentialPair]
    costs: np.ndarray
    exponent: Exponent
    pivots: int = 0

    @property
    def feasible(self) -> bool:
        return isinstance(self.plan, CausalPlan)

    @property
    def dual_value(self) -> float:
        if self.potentials is None or not isinstance(self.plan, CausalPlan):
            return -math.inf
        return self.potentials.dual_value(self.plan.source, self.plan.target)

    @property
    def gap(self) -> float:
        if not self.feasible:
            return 0.0
        return self.value - self.dual_value

    def to_report(self) -> Dict[str, Any]:
        """CLI 报告字段：value, ell_p, plan, phi, psi, gap"""
        report: Dict[str, Any] = {
            'p': self.exponent.p,
            'value': self.value,
            'ell_p': self.ell_p,
        }
        if isinstance(self.plan, CausalPlan):
            report['plan'] = self.plan.matrix.tolist()
            report['phi'] = self.potentials.phi.tolist() if self.potentials else []
            report['psi'] = self.potentials.psi.tolist() if self.potentials else []
            report['gap'] = self.gap
        else:
            report['plan'] = None
            report['phi'] = None
            report['psi'] = None
            report['gap'] = None
            report['cut'] = self.plan.cut
            report['strict'] = self.plan.strict
        return report


def cost_matrix(M: SpacetimeModel, mu: DiscreteMeasure, nu: DiscreteMeasure,
                e: Exponent) -> np.ndarray:
    """c_ij = u_p(ℓ(x_i, y_j))；ℓ < 0 恒为 −∞，p < 0 时 ℓ = 0 也为 −∞"""
    return u_p(e, M.ell_matrix(mu.locations, nu.locations))


def solve_primal(M: SpacetimeModel, mu: DiscreteMeasure, nu: DiscreteMeasure,
                 e: Exponent) -> SolveResult:
    """精确求解静态 Kantorovich 最大化

    Args:
        M: 时空模型
        mu: 源测度
        nu: 目标测度
        e: 指数

    Returns:
        SolveResult；不可行时 value = −∞，plan 为 Infeasible
    """
    start = time.perf_counter()
    ell = M.ell_matrix(mu.locations, nu.locations)
    costs = u_p(e, ell)

    verdict = feasible(M, mu, nu, strict=e.negative, ell=ell)
    if isinstance(verdict, Infeasible):
        ell_p = -math.inf
        if e.negative and feasible(M, mu, nu, strict=False, ell=ell).is_feasible:
            # 只有类光匹配：u_p(ℓ_p) = −∞ 对应 ℓ_p = 0
            ell_p = 0.0
        logger.info(f"静态问题不可行（{e}），返回 −∞")
        return SolveResult(-math.inf, ell_p, verdict, None, costs, e)

    admissible = np.isfinite(costs)
    edges = [(int(i), int(j)) for i, j in np.argwhere(admissible)]
    solver = TransportationSimplex(mu.weights, nu.weights, edges, costs[admissible])
    x, y = solver.solve()

    n, m = len(mu), len(nu)
    P = np.zeros((n, m))
    for (i, j), flow in zip(edges, x):
        P[i, j] = flow
    plan = CausalPlan(M, mu, nu, P, ell=ell)

    phi = y[:n].copy()
    psi = -y[n:].copy()
    shift = phi[0]
    potentials = PotentialPair(phi - shift, psi - shift)

    value = plan.cost(costs)
    ell_p = float(u_p_inverse(e, value))
    logger.debug(f"求解完成 {n}x{m}（{e}）: value={value:.12g}, 耗时 {time.perf_counter() - start:.4f}s")
    return SolveResult(value, ell_p, plan, potentials, costs, e, solver.pivots)
