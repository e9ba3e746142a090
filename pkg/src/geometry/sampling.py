# -*- coding: utf-8 -*-
"""
随机采样工具

所有函数都接收 numpy Generator，由 --seed 或测试固定种子驱动，结果可复现。
"""
import logging
from typing import Any, List, Tuple

import numpy as np

from src.geometry.emerald import Diamond
from src.geometry.spacetime import CausalCovector, CausalVector, Event, Minkowski

logger = logging.getLogger(__name__)


def _unit_directions(rng: np.random.Generator, dim: int, k: int) -> np.ndarray:
    g = rng.normal(size=(k, dim))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return g / norms


def random_causal_vector(rng: np.random.Generator, dim: int, scale: float = 1.0,
                         null: bool = False) -> CausalVector:
    """随机未来因果向量 s·(1, β·u)，β ∈ [0,1)，null=True 时 β = 1"""
    u = _unit_directions(rng, dim, 1)[0]
    beta = 1.0 if null else rng.uniform(0.0, 0.95)
    s = scale * rng.uniform(0.1, 1.0)
    return CausalVector((s, *(s * beta * u)))


def random_causal_covector(rng: np.random.Generator, dim: int, scale: float = 1.0,
                           null: bool = False) -> CausalCovector:
    """随机因果余向量（ω0 ≥ |ω⃗|）"""
    v = random_causal_vector(rng, dim, scale, null)
    return CausalCovector(v.components)


def random_event_between(rng: np.random.Generator, M: Minkowski, a: Event, b: Event,
                         max_tries: int = 1000) -> Event:
    """在 J(a, b) 中拒绝采样一个点；a ≤ b 退化时返回 a"""
    height = b.t - a.t
    if height <= 0:
        return a
    base = a.as_array()
    for _ in range(max_tries):
        t = rng.uniform(0.0, height)
        u = _unit_directions(rng, M.dim, 1)[0]
        r = t * rng.uniform(0.0, 1.0) ** (1.0 / M.dim)
        z = Event(tuple(base + np.concatenate(([t], r * u))))
        if M.time_separation(z, b) >= 0:
            return z
    logger.debug("J(a,b) 拒绝采样未命中，退回中点")
    return M.geodesic_point(a, b, 0.5)


def random_events_in_diamond(rng: np.random.Generator, diamond: Diamond, k: int) -> List[Event]:
    """菱形中均匀（拒绝采样）取 k 个点"""
    M = Minkowski(diamond.lo.dim)
    return [random_event_between(rng, M, diamond.lo, diamond.hi) for _ in range(k)]


def random_causal_polyline(rng: np.random.Generator, diamond: Diamond, k: int) -> List[Event]:
    """从 lo 出发、依次在 J(z_i, hi) 中取点的因果折线，共 k 个点"""
    M = Minkowski(diamond.lo.dim)
    points = [diamond.lo]
    for _ in range(k - 1):
        points.append(random_event_between(rng, M, points[-1], diamond.hi))
    return points


def random_measure(rng: np.random.Generator, M: Minkowski, k: int,
                   t_range: Tuple[float, float] = (0.0, 1.0),
                   spatial_extent: float = 1.0) -> Any:
    """随机离散测度：时间均匀、空间在立方体内、权重取 Dirichlet"""
    from src.measures.discrete import DiscreteMeasure

    t = rng.uniform(t_range[0], t_range[1], size=k)
    x = rng.uniform(-spatial_extent, spatial_extent, size=(k, M.dim))
    weights = rng.dirichlet(np.ones(k))
    atoms = [Event((float(t[i]), *x[i])) for i in range(k)]
    return DiscreteMeasure(atoms, weights)


def random_feasible_pair(rng: np.random.Generator, M: Minkowski, n: int, m: int,
                         time_shift: float = 2.5, spatial_extent: float = 1.0,
                         strict: bool = False, uniform: bool = False,
                         max_tries: int = 500) -> Tuple[Any, Any]:
    """随机生成满足 μ ⪯ ν 的一对测度（拒绝采样）

    Args:
        time_shift: 目标测度相对源测度的时间平移，越小边越稀疏
        strict: 要求严格（类时）可行，p < 0 时使用
        uniform: 等权原子

    Returns:
        (mu, nu)
    """
    from src.measures.discrete import DiscreteMeasure
    from src.transport.feasibility import feasible

    for attempt in range(max_tries):
        mu = random_measure(rng, M, n, (0.0, 1.0), spatial_extent)
        nu = random_measure(rng, M, m, (time_shift, time_shift + 1.0), spatial_extent)
        if uniform:
            mu = DiscreteMeasure(mu.locations, np.full(n, 1.0 / n))
            nu = DiscreteMeasure(nu.locations, np.full(m, 1.0 / m))
        if feasible(M, mu, nu, strict=strict).is_feasible:
            if attempt:
                logger.debug(f"随机可行对在第 {attempt + 1} 次采样得到")
            return mu, nu
    raise RuntimeError(f"{max_tries} 次采样内未得到可行测度对，请增大 time_shift")
