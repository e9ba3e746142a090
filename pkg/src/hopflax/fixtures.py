# -*- coding: utf-8 -*-
"""
Hopf–Lax 测试场

- chain_fixture：时间轴上的三点链，f = 时间坐标
- kink_fixture：时间轴上斜率 1 转 3 的折线函数
- ladder_field：若干条竖直"梯子"上的等距格点，f = S·t，声称 L = S/2
- random_steep_field：菱形中随机采样的点，f = S·t + 随机单调扰动，L 由采样点上的陡度算出
"""
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from src.geometry.emerald import Diamond
from src.geometry.sampling import random_causal_covector, random_events_in_diamond
from src.geometry.spacetime import Event, Minkowski
from src.hopflax.semigroup import HopfLaxField
from src.transport.duality import steepness
from src.transport.utility import Exponent

DEFAULT_T_GRID = (0.125, 0.25, 0.5, 1.0)


@dataclass(frozen=True)
class FieldInputs:
    """构造 HopfLaxField 所需的原始数据"""
    model: Minkowski
    points: Tuple[Event, ...]
    f: np.ndarray
    L: float
    interior: Optional[Tuple[int, ...]] = None

    def build(self, e: Exponent, t_grid: Sequence[float] = DEFAULT_T_GRID) -> HopfLaxField:
        return HopfLaxField.build(self.model, self.points, self.f, self.L, e, t_grid, self.interior)


def chain_fixture() -> FieldInputs:
    """E = {(0,0), (1,0), (2,0)}，f = t，L = 1"""
    M = Minkowski(1)
    pts = (Event.of(0, 0), Event.of(1, 0), Event.of(2, 0))
    return FieldInputs(M, pts, np.array([0.0, 1.0, 2.0]), 1.0)


def kink_fixture(h: float = 0.01, kink: float = 0.5) -> FieldInputs:
    """时间轴 t ∈ [0,1] 上步长 h 的格点，f 在 kink 之前斜率 1、之后斜率 3"""
    M = Minkowski(1)
    times = np.round(np.arange(0.0, 1.0 + h / 2, h), 12)
    pts = tuple(Event.of(float(t), 0.0) for t in times)
    f = np.where(times <= kink, times, kink + 3.0 * (times - kink))
    return FieldInputs(M, pts, f, 1.0)


def diamond_time_sample(rng: np.random.Generator, k: int, include_axis: bool = True) -> Tuple[Minkowski, List[Event]]:
    """菱形 J((0,0),(2,0)) 中的随机点，可附带一列纯时间方向的点"""
    M = Minkowski(1)
    diamond = Diamond(Event.of(0, 0), Event.of(2, 0))
    pts = random_events_in_diamond(rng, diamond, k)
    if include_axis:
        pts += [Event.of(float(t), 0.0) for t in np.linspace(0.9, 1.1, 5)]
    return M, pts


def ladder_field(rng: np.random.Generator, slope: Optional[float] = None, ladders: int = 3,
                 h: float = 0.02, rungs: int = 61, separation: float = 0.3) -> FieldInputs:
    """梯子场：ladders 条竖直线，每条 rungs 个等距点（t = k·h），f = S·t

    声称的陡度取 L = S/2；K 为 t ≥ 1 + h 的格点，保证每个 y ∈ K 在同一条梯子上
    拥有足够深的前驱。梯子间距至少 separation。
    """
    S = float(rng.uniform(2.0, 3.0)) if slope is None else float(slope)
    offsets = [0.0]
    while len(offsets) < ladders:
        cand = float(rng.uniform(-1.0, 1.0))
        if all(abs(cand - o) >= separation for o in offsets):
            offsets.append(cand)
    M = Minkowski(1)
    pts: List[Event] = []
    f: List[float] = []
    interior: List[int] = []
    for x in offsets:
        for k in range(rungs):
            t = k * h
            if t >= 1.0 + h - 1e-12:
                interior.append(len(pts))
            pts.append(Event.of(t, x))
            f.append(S * t)
    return FieldInputs(M, tuple(pts), np.asarray(f), S / 2.0, tuple(interior))


def causal_perturbation(rng: np.random.Generator, dim: int, bumps: int = 3,
                        amplitude: float = 0.5) -> Callable[[np.ndarray], np.ndarray]:
    """随机单调扰动 g(x) = ∑ a_i·½(1 + tanh((ω_i·x − c_i)/w_i))

    ω_i 为随机因果余向量，a_i ≥ 0，于是 x ≤ y 时 g(x) ≤ g(y)。
    """
    omegas = np.array([random_causal_covector(rng, dim).as_array() for _ in range(bumps)])
    heights = rng.uniform(0.0, amplitude, size=bumps)
    centers = rng.uniform(0.0, 1.5, size=bumps)
    widths = rng.uniform(0.2, 1.0, size=bumps)

    def g(X: np.ndarray) -> np.ndarray:
        s = np.atleast_2d(X) @ omegas.T
        return (heights * 0.5 * (1.0 + np.tanh((s - centers) / widths))).sum(axis=1)

    return g


def random_steep_field(rng: np.random.Generator, e: Exponent, k: Optional[int] = None, dim: int = 1,
                       slope: Optional[float] = None, bumps: int = 3) -> FieldInputs:
    """菱形 J((0,0⃗),(2,0⃗)) 中随机采样的陡场，f = S·t + g，g 为随机单调扰动

    声称的陡度 L = (p/2)·st(f)，st(f) 由有限点集直接算出。p ∈ (0,1) 时以 y 自身为比较
    对象即得最大化元满足 ℓ ≤ t·(p·st(f))^{1/(p−1)}，于是最大化元界与 Q_t f 的 L-陡
    在任意采样上都成立；p < 0 时没有这样的比较对象，不提供。

    Raises:
        ValueError: p < 0
    """
    if e.negative:
        raise ValueError(f"随机采样陡场只支持 p ∈ (0,1): {e}")
    n = int(rng.integers(30, 61)) if k is None else int(k)
    S = float(rng.uniform(1.0, 3.0)) if slope is None else float(slope)
    M = Minkowski(dim)
    origin = (0.0,) * dim
    diamond = Diamond(Event((0.0, *origin)), Event((2.0, *origin)))
    pts = tuple(random_events_in_diamond(rng, diamond, n))
    X = M.coords(list(pts))
    f = S * X[:, 0] + causal_perturbation(rng, dim, bumps)(X)
    st = steepness(M, pts, f)
    if not np.isfinite(st):
        raise ValueError("采样点中没有类时对，无法确定陡度")
    return FieldInputs(M, pts, f, 0.5 * e.p * st)


def two_point_fixture(ell: float = 1.0) -> Tuple[Minkowski, Event, Event]:
    """{x ≪ y}，ℓ(x,y) = ell"""
    return Minkowski(1), Event.of(0, 0), Event.of(float(ell), 0)


