# -*- coding: utf-8 -*-
"""
时空模型

两种实现共享同一接口：
- Minkowski(n)：平坦 R^{1,n}，号差 (+,−,…,−)，携带切向量/余向量几何
- FiniteCausal(labels, ell)：由 ℓ 矩阵给出的抽象有限因果空间，只携带 ℓ

因果判定一律用精确比较（无 epsilon），保证 ℓ 不会返回微小负数。
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Hashable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.errors import (
    CapabilityMissing,
    DimensionMismatch,
    InvalidEvent,
    InvalidModel,
    NonCausalCovector,
    NotCausallyRelated,
    UnknownLabel,
)

logger = logging.getLogger(__name__)

NEG_INF = -math.inf


class Relation(Enum):
    """两点间的因果关系"""
    BEFORE = 'Before'
    STRICTLY_BEFORE = 'StrictlyBefore'
    UNRELATED = 'Unrelated'

    @property
    def is_causal(self) -> bool:
        return self is not Relation.UNRELATED


@dataclass(frozen=True)
class Event:
    """时空中的点，coords[0] 为时间坐标"""
    coords: Tuple[float, ...]

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        if not coords:
            raise InvalidEvent("事件坐标不能为空")
        if not all(math.isfinite(c) for c in coords):
            raise InvalidEvent(f"事件坐标必须有限: {coords}")
        object.__setattr__(self, 'coords', coords)

    @classmethod
    def of(cls, *coords: float) -> 'Event':
        """Event.of(0, 1) 的简写"""
        return cls(tuple(coords))

    @property
    def t(self) -> float:
        return self.coords[0]

    @property
    def spatial(self) -> Tuple[float, ...]:
        return self.coords[1:]

    @property
    def dim(self) -> int:
        """空间维数 n"""
        return len(self.coords) - 1

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)


@dataclass(frozen=True)
class CausalVector:
    """基点处的切向量，分量与坐标同序"""
    components: Tuple[float, ...]
    base: Optional[Event] = None

    def __post_init__(self):
        object.__setattr__(self, 'components', tuple(float(c) for c in self.components))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.components, dtype=float)

    def is_future_causal(self) -> bool:
        """v0 ≥ |v⃗|；零向量算作因果"""
        v = self.as_array()
        return bool(v[0] >= np.linalg.norm(v[1:]))

    def scaled(self, factor: float) -> 'CausalVector':
        return CausalVector(tuple(factor * c for c in self.components), self.base)


@dataclass(frozen=True)
class CausalCovector:
    """基点处的余向量，作用于向量为分量逐项配对"""
    components: Tuple[float, ...]
    base: Optional[Event] = None

    def __post_init__(self):
        object.__setattr__(self, 'components', tuple(float(c) for c in self.components))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.components, dtype=float)

    def action(self, v: Union[CausalVector, Sequence[float], np.ndarray]) -> float:
        """ω(v)"""
        arr = v.as_array() if isinstance(v, CausalVector) else np.asarray(v, dtype=float)
        return float(np.dot(self.as_array(), arr))

    def is_causal(self) -> bool:
        """对所有未来因果向量非负 ⇔ ω0 ≥ |ω⃗|"""
        w = self.as_array()
        return bool(w[0] >= np.linalg.norm(w[1:]))


Point = Union[Event, Hashable]


def _lorentz_length(dt: np.ndarray, dx: np.ndarray) -> np.ndarray:
    """dt ≥ dx 时为 √(dt²−dx²)，否则 −∞

    写成 (dt−dx)(dt+dx) 以免类光对出现负的舍入误差。
    """
    dt = np.asarray(dt, dtype=float)
    dx = np.asarray(dx, dtype=float)
    causal = dt >= dx
    out = np.full(np.broadcast(dt, dx).shape, NEG_INF)
    prod = np.where(causal, (dt - dx) * (dt + dx), 0.0)
    np.sqrt(prod, out=out, where=causal)
    return out


class SpacetimeModel:
    """时空模型基类

    子类实现 ell_matrix()、validate_point()、time_function()；
    其余因果查询都由 ℓ 导出。
    """

    kind: str = 'abstract'
    supports_geometry: bool = False

    def validate_point(self, x: Any) -> Point:
        raise NotImplementedError

    def ell_matrix(self, xs: Sequence[Any], ys: Sequence[Any]) -> np.ndarray:
        """ℓ(xs[i], ys[j]) 的矩阵，不相关处为 −∞"""
        raise NotImplementedError

    def time_function(self, points: Sequence[Any]) -> np.ndarray:
        """光滑 1-steep 时间函数在各点的取值"""
        raise NotImplementedError

    def point_key(self, x: Any) -> Hashable:
        """原子合并用的键（精确相等）"""
        return self.validate_point(x)

    def time_separation(self, x: Any, y: Any) -> float:
        return float(self.ell_matrix([x], [y])[0, 0])

    def causally_related(self, x: Any, y: Any) -> Relation:
        ell = self.time_separation(x, y)
        if ell > 0:
            return Relation.STRICTLY_BEFORE
        if ell == 0:
            return Relation.BEFORE
        return Relation.UNRELATED

    def require_geometry(self, operation: str) -> None:
        if not self.supports_geometry:
            raise CapabilityMissing(f"{self.kind} 模型不支持 {operation}")

    def to_spec(self) -> Dict[str, Any]:
        raise NotImplementedError


class Minkowski(SpacetimeModel):
    """平坦 Minkowski 时空 R^{1,n}"""

    kind = 'minkowski'
    supports_geometry = True

    def __init__(self, dim: int):
        if int(dim) < 1:
            raise InvalidModel(f"空间维数必须 ≥ 1: {dim}")
        self.dim = int(dim)

    def __repr__(self):
        return f"Minkowski(dim={self.dim})"

    def __eq__(self, other):
        return isinstance(other, Minkowski) and other.dim == self.dim

    def __hash__(self):
        return hash(('minkowski', self.dim))

    def validate_point(self, x: Any) -> Event:
        event = x if isinstance(x, Event) else Event(tuple(x))
        if event.dim != self.dim:
            raise DimensionMismatch(f"事件维数 {event.dim} 与 R^(1,{self.dim}) 不符")
        return event

    def coords(self, points: Sequence[Any]) -> np.ndarray:
        """点列 → (k, n+1) 坐标数组"""
        if isinstance(points, np.ndarray) and points.ndim == 2:
            if points.shape[1] != self.dim + 1:
                raise DimensionMismatch(f"坐标列数 {points.shape[1]} 与 R^(1,{self.dim}) 不符")
            return points.astype(float, copy=False)
        return np.array([self.validate_point(p).coords for p in points], dtype=float).reshape(-1, self.dim + 1)

    def ell_matrix(self, xs: Sequence[Any], ys: Sequence[Any]) -> np.ndarray:
        X = self.coords(xs)
        Y = self.coords(ys)
        dt = Y[None, :, 0] - X[:, None, 0]
        dx = np.linalg.norm(Y[None, :, 1:] - X[:, None, 1:], axis=2)
        return _lorentz_length(dt, dx)

    def time_function(self, points: Sequence[Any]) -> np.ndarray:
        return self.coords(points)[:, 0].copy()

    def norm_g(self, v: Union[CausalVector, Sequence[float], np.ndarray]) -> float:
        arr = v.as_array() if isinstance(v, CausalVector) else np.asarray(v, dtype=float)
        if arr.shape != (self.dim + 1,):
            raise DimensionMismatch(f"向量维数 {arr.shape} 与 R^(1,{self.dim}) 不符")
        return float(_lorentz_length(arr[0], np.linalg.norm(arr[1:])))

    def norms_g(self, vectors: np.ndarray) -> np.ndarray:
        """(k, n+1) 向量数组的逐行 ‖·‖_g"""
        V = np.asarray(vectors, dtype=float).reshape(-1, self.dim + 1)
        return _lorentz_length(V[:, 0], np.linalg.norm(V[:, 1:], axis=1))

    def dual_norm(self, omega: Union[CausalCovector, Sequence[float], np.ndarray]) -> float:
        w = omega if isinstance(omega, CausalCovector) else CausalCovector(tuple(omega))
        arr = w.as_array()
        if arr.shape != (self.dim + 1,):
            raise DimensionMismatch(f"余向量维数 {arr.shape} 与 R^(1,{self.dim}) 不符")
        if not w.is_causal():
            raise NonCausalCovector(f"余向量 {w.components} 在某个未来因果向量上为负")
        return float(_lorentz_length(arr[0], np.linalg.norm(arr[1:])))

    def geodesic_point(self, x: Any, y: Any, lam: float) -> Event:
        ex, ey = self.validate_point(x), self.validate_point(y)
        if self.time_separation(ex, ey) == NEG_INF:
            raise NotCausallyRelated(f"{ex.coords} 与 {ey.coords} 不满足 x ≤ y")
        if not 0.0 <= lam <= 1.0:
            raise ValueError(f"插值参数必须在 [0,1]: {lam}")
        if lam == 0.0:
            return ex
        if lam == 1.0:
            return ey
        a, b = ex.as_array(), ey.as_array()
        return Event(tuple(a + lam * (b - a)))

    def to_spec(self) -> Dict[str, Any]:
        return {'type': 'minkowski', 'dim': self.dim}


class FiniteCausal(SpacetimeModel):
    """ℓ 矩阵给出的有限因果空间

    构造时校验：对角为 0；元素为 −∞ 或 ≥ 0；{ℓ ≥ 0} 反对称；反向三角不等式。
    """

    kind = 'finite'
    supports_geometry = False

    def __init__(self, ell: Union[Sequence[Sequence[float]], np.ndarray],
                 labels: Optional[Sequence[Hashable]] = None, tol: float = 1e-12):
        mat = np.array(ell, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] == 0:
            raise InvalidModel(f"ℓ 矩阵必须是非空方阵，得到形状 {mat.shape}")
        k = mat.shape[0]
        self.labels: List[Hashable] = list(labels) if labels is not None else list(range(k))
        if len(self.labels) != k or len(set(self.labels)) != k:
            raise InvalidModel("标签数量与矩阵阶数不符或有重复")
        self._index: Dict[Hashable, int] = {lab: i for i, lab in enumerate(self.labels)}
        self._validate(mat, tol)
        mat.setflags(write=False)
        self.ell = mat
        self._time = self.ell.max(axis=0)

    @staticmethod
    def _validate(mat: np.ndarray, tol: float) -> None:
        if np.isnan(mat).any() or np.isposinf(mat).any():
            raise InvalidModel("ℓ 矩阵不能含 NaN 或 +∞")
        finite_neg = np.isfinite(mat) & (mat < 0)
        if finite_neg.any():
            i, j = np.argwhere(finite_neg)[0]
            raise InvalidModel(f"ℓ[{i}][{j}] = {mat[i, j]}：元素必须为 −∞ 或 ≥ 0")
        if not np.all(np.diag(mat) == 0):
            raise InvalidModel("ℓ 矩阵对角线必须为 0")
        related = mat >= 0
        both = related & related.T
        np.fill_diagonal(both, False)
        if both.any():
            i, j = np.argwhere(both)[0]
            raise InvalidModel(f"点 {i} 与 {j} 互为因果前驱，违反偏序反对称性")
        # ℓ(i,k) ≥ ℓ(i,j) + ℓ(j,k)
        with np.errstate(invalid='ignore'):
            through = mat[:, :, None] + mat[None, :, :]
        bad = np.isfinite(through) & (through > mat[:, None, :] + tol)
        if bad.any():
            i, j, k = np.argwhere(bad)[0]
            raise InvalidModel(f"反向三角不等式不成立: ℓ({i},{k}) < ℓ({i},{j}) + ℓ({j},{k})")

    def __repr__(self):
        return f"FiniteCausal(size={len(self.labels)})"

    def validate_point(self, x: Any) -> Hashable:
        if isinstance(x, (list, np.ndarray)):
            raise UnknownLabel(f"有限因果空间只接受标签: {x!r}")
        if x not in self._index:
            raise UnknownLabel(f"未知标签: {x!r}")
        return x

    def index_of(self, x: Any) -> int:
        return self._index[self.validate_point(x)]

    def ell_matrix(self, xs: Sequence[Any], ys: Sequence[Any]) -> np.ndarray:
        ix = [self.index_of(x) for x in xs]
        iy = [self.index_of(y) for y in ys]
        return self.ell[np.ix_(ix, iy)].copy()

    def time_function(self, points: Sequence[Any]) -> np.ndarray:
        """t(x) = max_z ℓ(z,x)，由反向三角不等式知其为 1-steep"""
        return np.array([self._time[self.index_of(p)] for p in points], dtype=float)

    def to_spec(self) -> Dict[str, Any]:
        spec: Dict[str, Any] = {'type': 'finite', 'ell': self.ell.tolist()}
        if self.labels != list(range(len(self.labels))):
            spec['labels'] = list(self.labels)
        return spec


# ========== 与操作名一一对应的函数接口 ==========

def causally_related(M: SpacetimeModel, x: Any, y: Any) -> Relation:
    """x 与 y 的因果关系；x 与自身为 Before"""
    return M.causally_related(x, y)


def time_separation(M: SpacetimeModel, x: Any, y: Any) -> float:
    """时间分离 ℓ(x,y)，不相关时为 −∞"""
    return M.time_separation(x, y)


def norm_g(M: SpacetimeModel, v: Union[CausalVector, Sequence[float]]) -> float:
    """双曲范数：未来因果时为 √(v0²−|v⃗|²)，否则 −∞"""
    M.require_geometry('norm_g')
    assert isinstance(M, Minkowski)
    return M.norm_g(v)


def dual_norm(M: SpacetimeModel, omega: Union[CausalCovector, Sequence[float]]) -> float:
    """对偶双曲范数 inf_{‖v‖≥1} ω(v)

    Raises:
        NonCausalCovector: ω 不是因果余向量
    """
    M.require_geometry('dual_norm')
    assert isinstance(M, Minkowski)
    return M.dual_norm(omega)


def geodesic_point(M: SpacetimeModel, x: Any, y: Any, lam: float) -> Event:
    """x 到 y 的直线测地线上参数 λ 处的点

    Raises:
        NotCausallyRelated: x ≰ y
        CapabilityMissing: 有限因果空间没有测地线
    """
    M.require_geometry('geodesic_point')
    assert isinstance(M, Minkowski)
    return M.geodesic_point(x, y, lam)


def model_from_spec(spec: Dict[str, Any]) -> SpacetimeModel:
    """{"type":"minkowski","dim":n} 或 {"type":"finite","ell":[[...]],"labels"?:[...]}"""
    kind = spec.get('type')
    if kind == 'minkowski':
        return Minkowski(int(spec['dim']))
    if kind == 'finite':
        from src.core.utils import decode_real
        ell = [[decode_real(v) for v in row] for row in spec['ell']]
        return FiniteCausal(ell, spec.get('labels'))
    raise InvalidModel(f"未知时空类型: {kind!r}")
