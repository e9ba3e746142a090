# -*- coding: utf-8 -*-
"""
c_p 变换、陡度与对偶性核验
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.core.errors import DualityGap
from src.geometry.spacetime import SpacetimeModel
from src.measures.discrete import CausalPlan, DiscreteMeasure
from src.transport.solver import SolveResult
from src.transport.utility import Exponent, u_p

logger = logging.getLogger(__name__)

DEFAULT_EPSILONS = (1e-1, 1e-2, 1e-3)
# 陡化界中时间邻域的余量，与 bounding_emerald 的默认余量一致
TIME_MARGIN = 1.0


def cp_transform_fwd(M: SpacetimeModel, E: Sequence[Any], phi: Sequence[float], e: Exponent,
                     at: Optional[Sequence[Any]] = None) -> np.ndarray:
    """φ^{c_p}_E(y) = max_{x ∈ E, x ≤ y} φ(x) + u_p(ℓ(x,y))

    Args:
        E: 有限点集
        phi: φ 在 E 上的取值
        at: 求值点，默认为 E 本身

    Returns:
        各求值点的变换值（可为 −∞）
    """
    targets = list(E) if at is None else list(at)
    C = u_p(e, M.ell_matrix(list(E), targets))
    vals = np.asarray(phi, dtype=float)[:, None] + C
    return vals.max(axis=0)


def cp_transform_bwd(M: SpacetimeModel, E: Sequence[Any], psi: Sequence[float], e: Exponent,
                     at: Optional[Sequence[Any]] = None) -> np.ndarray:
    """ψ^{c_p}_E(x) = min_{y ∈ E} ψ(y) − u_p(ℓ(x,y))，ℓ = −∞ 的点对贡献 +∞"""
    sources = list(E) if at is None else list(at)
    C = u_p(e, M.ell_matrix(sources, list(E)))
    vals = np.asarray(psi, dtype=float)[None, :] - C
    return vals.min(axis=1)


def steepness(M: SpacetimeModel, E: Sequence[Any], f: Sequence[float],
              ell: Optional[np.ndarray] = None) -> float:
    """min_{ℓ(x,y) > 0} (f(y) − f(x)) / ℓ(x,y)；无类时对时为 +∞"""
    pts = list(E)
    if ell is None:
        ell = M.ell_matrix(pts, pts)
    mask = ell > 0
    if not mask.any():
        return math.inf
    vals = np.asarray(f, dtype=float)
    diff = vals[None, :] - vals[:, None]
    return float((diff[mask] / ell[mask]).min())


def max_abs_time(M: SpacetimeModel, points: Sequence[Any], margin: float = TIME_MARGIN) -> float:
    """时间函数在支撑的时间邻域上的 sup 范数

    Minkowski 取 [min t − margin, max t + margin] 两端的 |t|；有限因果空间取全体点。
    """
    if M.supports_geometry:
        t = M.time_function(list(points))
        return float(max(abs(t.min() - margin), abs(t.max() + margin)))
    labels = getattr(M, 'labels', list(points))
    return float(np.max(np.abs(M.time_function(labels))))


@dataclass
class DualityReport:
    """对偶性核验报告"""
    primal: float
    dual: float
    gap: float
    max_violation: float
    max_slackness: float
    steepening: List[Dict[str, Any]] = field(default_factory=list)
    failed: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failed

    def to_report(self) -> Dict[str, Any]:
        return {
            'primal': self.primal,
            'dual': self.dual,
            'gap': self.gap,
            'max_violation': self.max_violation,
            'max_slackness': self.max_slackness,
            'steepening': self.steepening,
            'ok': self.ok,
            'failed': self.failed,
        }


def verify_duality(M: SpacetimeModel, mu: DiscreteMeasure, nu: DiscreteMeasure, e: Exponent,
                   result: SolveResult, tol: float = 1e-9,
                   epsilons: Sequence[float] = DEFAULT_EPSILONS) -> DualityReport:
    """核验强对偶

    (a) 势的可行性与互补松弛；(b) 对偶值与原始值之差 ≤ tol·max(1,|primal|)；
    (c) 陡化：φ ↦ φ + ε·t 后重新做 c_p 变换，对偶值变化 ≤ 2ε·max|t|，
        且仍不低于原始值（弱对偶）。

    Raises:
        DualityGap: 任一项失败
    """
    if not result.feasible or result.value == -math.inf or result.potentials is None:
        raise ValueError("verify_duality 需要有限的最优值")
    plan = result.plan
    assert isinstance(plan, CausalPlan)
    pot = result.potentials
    costs = result.costs
    admissible = np.isfinite(costs)

    slack = pot.slack(costs)
    max_violation = float(max(0.0, -slack[admissible].min())) if admissible.any() else 0.0
    on_support = plan.matrix > 0
    max_slackness = float(np.abs(slack[on_support]).max()) if on_support.any() else 0.0

    primal = result.value
    dual = pot.dual_value(mu, nu)
    gap = primal - dual
    scale = max(1.0, abs(primal))
    # 势的量级随代价走，可行性与松弛按代价量级放缩
    ctol = tol * max(1.0, float(np.abs(costs[admissible]).max())) if admissible.any() else tol
    failed: List[str] = []
    if max_violation > ctol:
        failed.append('feasibility')
    if max_slackness > ctol:
        failed.append('slackness')
    if abs(gap) > tol * scale:
        failed.append('gap')

    t_src = M.time_function(mu.locations)
    t_max = max_abs_time(M, list(mu.locations) + list(nu.locations))
    steepening: List[Dict[str, Any]] = []
    for eps in epsilons:
        phi_eps = pot.phi + eps * t_src
        psi_eps = (phi_eps[:, None] + costs).max(axis=0)
        value_eps = float(np.dot(nu.weights, psi_eps) - np.dot(mu.weights, phi_eps))
        shift = abs(value_eps - dual)
        bound = 2.0 * eps * t_max
        ok = shift <= bound + tol * scale and value_eps >= primal - tol * scale
        steepening.append({'eps': eps, 'value': value_eps, 'shift': shift, 'bound': bound, 'ok': ok})
        if not ok:
            failed.append(f'steepening({eps:g})')

    report = DualityReport(primal, dual, gap, max_violation, max_slackness, steepening, failed)
    if failed:
        logger.warning(f"对偶性核验失败: {failed}, gap={gap:.3e}")
        raise DualityGap({'failed': failed, **report.to_report()})
    logger.debug(f"对偶性核验通过: gap={gap:.3e}")
    return report
