# -*- coding: utf-8 -*-
"""
因果连续性不等式（CCI）检查

对光滑因果试验函数 φ，离散形式为
    residual_k = [Φ(t_{k+1}) − Φ(t_k)] − Δ_k·½[∫dφ(v_{t_k})dμ_{t_k} + ∫dφ(v_{t_{k+1}})dμ_{t_{k+1}}]
其中 Φ(t) = ∫φ dμ_t。通过条件 residual_k ≥ −(tol + C·Δ_k²)。
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.errors import DomainMismatch, NonCausalCovector
from src.geometry.sampling import random_causal_covector
from src.geometry.spacetime import CausalCovector, Minkowski, SpacetimeModel
from src.measures.paths import MeasurePath

logger = logging.getLogger(__name__)

# sup |d²/du² ½(1+tanh u)| = 2/(3√3)
_TANH_D2 = 2.0 / (3.0 * math.sqrt(3.0))
# sup |d³/du³ ½(1+tanh u)| = 1
_TANH_D3 = 1.0


@dataclass(frozen=True)
class Ramp:
    """单调光滑的 tanh 斜坡 r(s) = h·½(1 + tanh((s − c)/w))

    由断点 (lo, hi) 给出：c = (lo+hi)/2，w = (hi−lo)/4。
    """
    lo: float
    hi: float
    height: float = 1.0

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError(f"斜坡断点必须 lo < hi: ({self.lo}, {self.hi})")
        if not self.height > 0:
            raise ValueError(f"斜坡高度必须为正: {self.height}")

    @property
    def center(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return 0.25 * (self.hi - self.lo)

    def value(self, s: np.ndarray) -> np.ndarray:
        return self.height * 0.5 * (1.0 + np.tanh((s - self.center) / self.width))

    def derivative(self, s: np.ndarray) -> np.ndarray:
        return self.height * 0.5 / self.width / np.cosh((s - self.center) / self.width) ** 2

    def sup_second(self) -> float:
        return self.height * _TANH_D2 / self.width ** 2

    def sup_third(self) -> float:
        return self.height * _TANH_D3 / self.width ** 3


class TestKind(Enum):
    LINEAR = 'linear'
    COMPOSITE = 'composite'


@dataclass(frozen=True)
class TestFunction:
    """试验函数：线性 φ(x) = a·x，或单调复合 φ(x) = r(a·x)

    a 必须是因果余向量，于是 dφ = r'(a·x)·a 处处因果。
    """
    a: CausalCovector
    ramp: Optional[Ramp] = None
    name: str = ''

    __test__ = False

    def __post_init__(self):
        if not self.a.is_causal():
            raise NonCausalCovector(f"试验函数的余向量 {self.a.components} 不是因果的")

    @property
    def kind(self) -> TestKind:
        return TestKind.LINEAR if self.ramp is None else TestKind.COMPOSITE

    def values(self, X: np.ndarray) -> np.ndarray:
        s = X @ self.a.as_array()
        return s if self.ramp is None else self.ramp.value(s)

    def differential(self, X: np.ndarray, V: np.ndarray) -> np.ndarray:
        """dφ_x(v) 逐行"""
        av = V @ self.a.as_array()
        if self.ramp is None:
            return av
        return self.ramp.derivative(X @ self.a.as_array()) * av

    def curvature_constant(self, max_speed: float) -> float:
        """C = (sup|r''|·A² + sup|r'''|·A³)/12，A = max a·v；线性函数为 0"""
        if self.ramp is None:
            return 0.0
        A = max_speed
        return (self.ramp.sup_second() * A ** 2 + self.ramp.sup_third() * A ** 3) / 12.0

    def label(self) -> str:
        if self.name:
            return self.name
        comps = ','.join(f"{c:.3g}" for c in self.a.components)
        return f"{self.kind.value}({comps})"


def linear(a: Sequence[float], name: str = '') -> TestFunction:
    return TestFunction(CausalCovector(tuple(float(c) for c in a)), None, name)


def ramp_composite(a: Sequence[float], ramp: Ramp, name: str = '') -> TestFunction:
    return TestFunction(CausalCovector(tuple(float(c) for c in a)), ramp, name)


def standard_battery(M: Minkowski, rng: Optional[np.random.Generator] = None,
                     random_covectors: int = 10, ramp: Optional[Ramp] = None) -> List[TestFunction]:
    """标准试验函数组

    余向量取 (1,0,…)、2n 个类光方向 (1, ±e_i) 以及 random_covectors 个随机因果余向量，
    每个都再与一个 tanh 斜坡复合。
    """
    n = M.dim
    rng = rng if rng is not None else np.random.default_rng(0)
    ramp = ramp or Ramp(0.0, 2.0)
    covectors: List[Tuple[str, Tuple[float, ...]]] = [('time', (1.0,) + (0.0,) * n)]
    for i in range(n):
        for sign in (1.0, -1.0):
            e = [0.0] * n
            e[i] = sign
            covectors.append((f"null{'+' if sign > 0 else '-'}{i + 1}", (1.0, *e)))
    for r in range(random_covectors):
        covectors.append((f"random{r}", random_causal_covector(rng, n).components))
    battery = []
    for name, a in covectors:
        battery.append(linear(a, name))
        battery.append(ramp_composite(a, ramp, f"{name}∘ramp"))
    return battery


@dataclass
class CCITestResult:
    """单个试验函数的逐区间残差"""
    name: str
    residuals: List[float]
    tolerances: List[float]
    phi: List[float]
    monotone: bool

    @property
    def ok(self) -> bool:
        return all(r >= -tol for r, tol in zip(self.residuals, self.tolerances))

    @property
    def min_residual(self) -> float:
        return min(self.residuals) if self.residuals else 0.0

    def to_report(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'ok': self.ok,
            'min_residual': self.min_residual,
            'monotone': self.monotone,
            'residuals': self.residuals,
            'tolerances': self.tolerances,
        }


@dataclass
class CCIReport:
    results: List[CCITestResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    @property
    def min_residual(self) -> float:
        return min((r.min_residual for r in self.results), default=0.0)

    def failures(self) -> List[str]:
        return [r.name for r in self.results if not r.ok]

    def to_report(self) -> Dict[str, Any]:
        return {
            'ok': self.ok,
            'min_residual': self.min_residual,
            'tests': [r.to_report() for r in self.results],
        }


def _layers(M: Minkowski, P: MeasurePath, V: Any) -> List[Tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """每个网格时间的 (坐标, 权重, 速度)，速度与原子对齐"""
    if V.times.shape != P.times.shape or np.any(np.abs(V.times - P.times) > 1e-12):
        raise DomainMismatch("速度场与测度路径的网格不一致")
    out = []
    for k, mu in enumerate(P.measures):
        X = M.coords(mu.locations)
        out.append((X, mu.weights, V.aligned(k, mu)))
    return out


def check_cci(M: SpacetimeModel, P: MeasurePath, V: Any, tests: Sequence[TestFunction],
              tol: float = 1e-9) -> CCIReport:
    """逐区间核验 CCI（梯形积分）

    Args:
        M: Minkowski 模型
        P: 测度路径
        V: 定义在 P 支撑上的 VelocitySeries
        tests: 试验函数
        tol: 残差容差的常数项

    Raises:
        DomainMismatch: 网格不一致或速度场未覆盖支撑
    """
    M.require_geometry('check_cci')
    assert isinstance(M, Minkowski)
    layers = _layers(M, P, V)
    dt = np.diff(P.times)
    report = CCIReport()
    for test in tests:
        a = test.a.as_array()
        max_av = max((float(np.max(Vk @ a)) for _, _, Vk in layers if Vk.size), default=0.0)
        C = test.curvature_constant(max(max_av, 0.0))
        phi = np.array([float(np.dot(w, test.values(X))) for X, w, _ in layers])
        drift = np.array([float(np.dot(w, test.differential(X, Vk))) for X, w, Vk in layers])
        residuals = (np.diff(phi) - 0.5 * dt * (drift[:-1] + drift[1:])).tolist()
        tols = (tol + C * dt ** 2).tolist()
        monotone = bool(np.all(np.diff(phi) >= -tol))
        result = CCITestResult(test.label(), residuals, tols, phi.tolist(), monotone)
        if not result.ok:
            logger.warning(f"CCI 违例: {result.name}, 最小残差 {result.min_residual:.3e}")
        report.results.append(result)
    return report


def residual_mass(M: SpacetimeModel, P: MeasurePath, V: Any, test: TestFunction) -> float:
    """∑_k |residual_k|，用于网格加倍的收敛阶估计"""
    report = check_cci(M, P, V, [test], tol=0.0)
    return float(np.sum(np.abs(report.results[0].residuals)))


def refinement_ratio(M: SpacetimeModel, mu0: Any, mu1: Any, plan: Any, test: TestFunction,
                     coarse_level: int = 5) -> float:
    """网格 2^k+1 与 2^{k+1}+1 上测地构造的 ∑|residual| 之比（光滑情形约为 4）"""
    from src.dynamics.interpolation import barycentric_velocity, geodesic_path

    masses = []
    for level in (coarse_level, coarse_level + 1):
        path, lifted = geodesic_path(M, mu0, mu1, plan, 2 ** level + 1)
        V = barycentric_velocity(M, lifted)
        masses.append(residual_mass(M, path, V, test))
    if masses[1] == 0:
        return math.inf if masses[0] > 0 else math.nan
    return masses[0] / masses[1]
