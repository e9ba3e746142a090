# -*- coding: utf-8 -*-
"""
有限点集上的 Lorentz Hopf–Lax 半群

Q_t^p f(y) = max_{x ∈ E, x ≤ y} f(x) + t·u_p(ℓ(x,y)/t)，Q_0 = f。

"J⁻(y) ∩ E" 只是对 ℓ 矩阵的过滤，不做几何查询，因此同样适用于有限因果空间。
"""
import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.errors import NoTimelikePair, PropertyViolation
from src.geometry.spacetime import Event, SpacetimeModel
from src.transport.duality import steepness
from src.transport.utility import Exponent, u_p

logger = logging.getLogger(__name__)

TIE_TOL = 1e-12
STEEP_TOL = 1e-9
BOUND_TOL = 1e-12


@dataclass(frozen=True)
class QEval:
    """单点求值结果：值、最大化元下标（无前驱时为 −1）、L_max"""
    value: float
    argmax: int
    lmax: float


def _q_columns(f: np.ndarray, ell: np.ndarray, t: float, e: Exponent,
               tie_tol: float = TIE_TOL) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """对 ell 的每一列 y 计算 (Q_t f(y), argmax, L_max)

    并列（差值在 tie_tol·max(1,|Q|) 内）的最大化元中取 ℓ 最大者，再取下标最小者。
    """
    n_cols = ell.shape[1]
    if t == 0:
        raise ValueError("t = 0 时 Q_0 = f，由调用方处理")
    with np.errstate(invalid='ignore'):
        cand = f[:, None] + t * np.asarray(u_p(e, ell / t), dtype=float).reshape(ell.shape)
    values = cand.max(axis=0)
    argmax = np.full(n_cols, -1, dtype=int)
    lmax = np.full(n_cols, -math.inf)
    finite = np.isfinite(values)
    if finite.any():
        thresh = values - tie_tol * np.maximum(1.0, np.abs(values))
        near = np.isfinite(cand) & (cand >= thresh[None, :])
        masked = np.where(near, ell, -math.inf)
        lmax = np.where(finite, masked.max(axis=0), -math.inf)
        for j in np.flatnonzero(finite):
            rows = np.flatnonzero(near[:, j] & (ell[:, j] == lmax[j]))
            argmax[j] = int(rows[0])
    return values, argmax, lmax


def q_eval_detail(M: SpacetimeModel, points: Sequence[Any], f: Sequence[float], t: float, y: Any,
                  e: Exponent, tie_tol: float = TIE_TOL) -> QEval:
    """Q_t^p f(y) 及其最大化元、L_max

    Args:
        points: 有限点集 E
        f: f 在 E 上的取值（与 points 同序）
        t: 时间，t ∈ [0,1]；t = 0 时返回 f(y)
        y: E 中的点
    """
    pts = list(points)
    vals = np.asarray(f, dtype=float)
    if len(vals) != len(pts):
        raise ValueError(f"f 的长度 {len(vals)} 与点数 {len(pts)} 不符")
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t 必须在 [0,1]: {t}")
    keys = [M.point_key(x) for x in pts]
    j = keys.index(M.point_key(y))
    if t == 0:
        return QEval(float(vals[j]), j, 0.0)
    ell = M.ell_matrix(pts, [pts[j]])
    values, argmax, lmax = _q_columns(vals, ell, t, e, tie_tol)
    return QEval(float(values[0]), int(argmax[0]), float(lmax[0]))


def q_eval(M: SpacetimeModel, points: Sequence[Any], f: Sequence[float], t: float, y: Any,
           e: Exponent) -> float:
    """Q_t^p f(y)；p < 0 且 y 在 E 中没有严格前驱时为 −∞"""
    return q_eval_detail(M, points, f, t, y, e).value


@dataclass(frozen=True)
class HopfLaxField:
    """t 网格上的 Q_t^p f，附带最大化元与 L_max

    values/argmax/lmax 的形状均为 (len(t_grid), len(points))。
    """
    model: SpacetimeModel
    points: Tuple[Any, ...]
    f: np.ndarray
    L: float
    exponent: Exponent
    t_grid: np.ndarray
    interior: Tuple[int, ...]
    ell: np.ndarray
    values: np.ndarray
    argmax: np.ndarray
    lmax: np.ndarray

    @classmethod
    def build(cls, M: SpacetimeModel, points: Sequence[Any], f: Sequence[float], L: float,
              e: Exponent, t_grid: Sequence[float], interior: Optional[Sequence[int]] = None,
              steep_tol: float = STEEP_TOL, tie_tol: float = TIE_TOL) -> 'HopfLaxField':
        """构造并校验

        Args:
            M: 时空模型
            points: 有限点集 E
            f: E 上的函数值
            L: 声称的陡度
            e: 指数
            t_grid: (0,1] 内的时间网格
            interior: 内部子集 K 的下标，默认 E 全体

        Raises:
            PropertyViolation: f 不是 L-陡的，或不沿因果序单调
        """
        pts = tuple(M.validate_point(x) for x in points)
        vals = np.asarray(f, dtype=float).reshape(-1)
        if vals.size != len(pts):
            raise ValueError(f"f 的长度 {vals.size} 与点数 {len(pts)} 不符")
        if not np.all(np.isfinite(vals)):
            raise ValueError("f 必须处处有限")
        if not L > 0:
            raise PropertyViolation('steepness', f"L = {L} 必须为正")
        grid = np.sort(np.asarray(t_grid, dtype=float).reshape(-1))
        if grid.size == 0 or grid[0] <= 0 or grid[-1] > 1.0:
            raise ValueError(f"t 网格必须落在 (0,1]: {grid.tolist()}")

        ell = M.ell_matrix(list(pts), list(pts))
        st = steepness(M, pts, vals, ell)
        if st < L - steep_tol:
            raise PropertyViolation('steepness', f"st(f) = {st:.6g} < L = {L:g}")
        related = ell >= 0
        with np.errstate(invalid='ignore'):
            drop = vals[:, None] - vals[None, :]
        if np.any(related & (drop > steep_tol)):
            i, j = np.argwhere(related & (drop > steep_tol))[0]
            raise PropertyViolation('causal', (int(i), int(j)))

        T, n = grid.size, len(pts)
        values = np.empty((T, n))
        argmax = np.empty((T, n), dtype=int)
        lmax = np.empty((T, n))
        for k, t in enumerate(grid):
            values[k], argmax[k], lmax[k] = _q_columns(vals, ell, float(t), e, tie_tol)
        K = tuple(range(n)) if interior is None else tuple(sorted(int(i) for i in interior))
        for arr in (vals, grid, ell, values, argmax, lmax):
            arr.setflags(write=False)
        logger.debug(f"Hopf–Lax 场: |E|={n}, |K|={len(K)}, t 网格 {grid.tolist()}（{e}）")
        return cls(M, pts, vals, float(L), e, grid, K, ell, values, argmax, lmax)

    def index_of(self, y: Any) -> int:
        key = self.model.point_key(y)
        for i, x in enumerate(self.points):
            if self.model.point_key(x) == key:
                return i
        raise KeyError(f"点 {y!r} 不在 E 中")

    def t_index(self, t: float) -> int:
        hits = np.flatnonzero(np.abs(self.t_grid - t) <= 1e-12)
        if hits.size == 0:
            raise KeyError(f"t = {t} 不在网格上")
        return int(hits[0])

    def q_function(self, t: float) -> np.ndarray:
        """Q_t f 在 E 上的取值；t = 0 给出 f，不在网格上的 t 直接重算"""
        if t == 0:
            return self.f
        try:
            return self.values[self.t_index(t)]
        except KeyError:
            return _q_columns(self.f, self.ell, float(t), self.exponent)[0]

    def value(self, t: float, y: Any) -> float:
        return float(self.values[self.t_index(t), self.index_of(y)])

    def lmax_at(self, t: float, y: Any) -> float:
        return float(self.lmax[self.t_index(t), self.index_of(y)])

    def argmax_point(self, t: float, y: Any) -> Optional[Any]:
        i = int(self.argmax[self.t_index(t), self.index_of(y)])
        return None if i < 0 else self.points[i]

    def maximizers(self, t: float, j: int, tie_tol: float = TIE_TOL) -> np.ndarray:
        """Q_t f(y_j) 的全部最大化元下标"""
        col = self.ell[:, j]
        with np.errstate(invalid='ignore'):
            cand = self.f + t * np.asarray(u_p(self.exponent, col / t), dtype=float)
        best = cand.max()
        if not np.isfinite(best):
            return np.zeros(0, dtype=int)
        return np.flatnonzero(np.isfinite(cand) & (cand >= best - tie_tol * max(1.0, abs(best))))

    def recompute_max_error(self) -> float:
        """存储值与逐点重算之差的最大值"""
        worst = 0.0
        for k, t in enumerate(self.t_grid):
            fresh = _q_columns(self.f, self.ell, float(t), self.exponent)[0]
            both = np.isfinite(fresh) | np.isfinite(self.values[k])
            if np.any(np.isfinite(fresh[both]) != np.isfinite(self.values[k][both])):
                return math.inf
            fin = np.isfinite(fresh)
            if fin.any():
                worst = max(worst, float(np.abs(fresh[fin] - self.values[k][fin]).max()))
        return worst


# ========== 性质检查 ==========

def maximizer_bound(L: float, t: float, e: Exponent) -> float:
    """受限区域半径 t·L^{1/(p−1)}"""
    return t * L ** (1.0 / (e.p - 1.0))


def check_maximizer_bound(field: HopfLaxField, t: float, y: Any, e: Optional[Exponent] = None,
                          L: Optional[float] = None) -> bool:
    """存在某个最大化元满足 ℓ(x,y) ≤ t·L^{1/(p−1)} + 1e−12

    Args:
        L: 覆盖场上声称的陡度，默认取 field.L
    """
    e = e or field.exponent
    bound = maximizer_bound(field.L if L is None else L, t, e)
    j = field.index_of(y)
    winners = field.maximizers(t, j)
    if winners.size == 0:
        return True
    ok = bool(np.any(field.ell[winners, j] <= bound + BOUND_TOL))
    if not ok:
        logger.warning(f"最大化元越界: t={t}, y={y!r}, min ℓ={field.ell[winners, j].min():.6g} > {bound:.6g}")
    return ok


def lipschitz_constant(L: float, e: Exponent, eps: float) -> float:
    """t ∈ [ε,1] 上 t ↦ Q_t f 的 Lipschitz 常数

    |u_p(L^{1/(p−1)})| · sup_{[ε,1]} |d(t^{1−p})/dt| = |u_p(L^{1/(p−1)})|·(1−p)·max(ε^{−p}, 1)。
    """
    s = L ** (1.0 / (e.p - 1.0))
    return abs(float(u_p(e, s))) * (1.0 - e.p) * max(eps ** (-e.p), 1.0)


@dataclass
class SemigroupReport:
    """check_semigroup_properties 的结果"""
    steepness: List[float] = dataclasses.field(default_factory=list)
    monotone: bool = True
    convergence_gap: float = 0.0
    young_bound_ok: bool = True
    lipschitz_constant: float = 0.0
    lipschitz_observed: float = 0.0
    recompute_error: float = 0.0
    unreachable: int = 0

    @property
    def lipschitz_ok(self) -> bool:
        return self.lipschitz_observed <= self.lipschitz_constant + 1e-9

    def to_report(self) -> Dict[str, Any]:
        return {
            'steepness': self.steepness,
            'monotone': self.monotone,
            'convergence_gap': self.convergence_gap,
            'young_bound_ok': self.young_bound_ok,
            'lipschitz_constant': self.lipschitz_constant,
            'lipschitz_observed': self.lipschitz_observed,
            'lipschitz_ok': self.lipschitz_ok,
            'recompute_error': self.recompute_error,
            'unreachable': self.unreachable,
        }


def check_semigroup_properties(field: HopfLaxField, e: Optional[Exponent] = None,
                               tol: float = STEEP_TOL) -> SemigroupReport:
    """在 t 网格上核验 Q_t f 的结构性质

    (a) Q_t f 在 K 上 L-陡；(b) 关于 t 单调（p ∈ (0,1) 不减，p < 0 不增）；
    (c) t ↓ 0 时单调收敛到 f，且满足 Q_t f ≤ f − t·u_q(L)；
    (d) [ε,1] 上的 Lipschitz 常数只记录，不作断言。

    K 上取 −∞ 的点（p < 0 时没有严格前驱）不参与 (a)–(c)，计入 unreachable。

    Raises:
        PropertyViolation: (a)–(c) 或存储值重算不一致
    """
    e = e or field.exponent
    report = SemigroupReport()
    K = np.asarray(field.interior, dtype=int)
    finite_all = np.all(np.isfinite(field.values[:, K]), axis=0)
    report.unreachable = int((~finite_all).sum())
    K = K[finite_all]
    scale = max(1.0, float(np.abs(field.f).max()))

    report.recompute_error = field.recompute_max_error()
    if report.recompute_error > TIE_TOL * scale:
        raise PropertyViolation('recompute', report.recompute_error)

    sub_ell = field.ell[np.ix_(K, K)]
    for k, t in enumerate(field.t_grid):
        st = steepness(field.model, [field.points[i] for i in K], field.values[k, K], sub_ell)
        report.steepness.append(st)
        if st < field.L - tol:
            raise PropertyViolation('steepness', (float(t), st))

    sign = 1.0 if e.p > 0 else -1.0
    layers = np.vstack([field.f[K][None, :], field.values[:, K]])
    steps = sign * np.diff(layers, axis=0)
    if np.any(steps < -tol * scale):
        k, i = np.argwhere(steps < -tol * scale)[0]
        report.monotone = False
        raise PropertyViolation('monotone', (float(([0.0] + field.t_grid.tolist())[k + 1]), int(K[i])))
    report.convergence_gap = float(np.abs(field.values[0, K] - field.f[K]).max()) if K.size else 0.0

    young = field.f[K][None, :] - field.t_grid[:, None] * float(u_p(e.conjugate, field.L))
    if np.any(field.values[:, K] > young + tol * scale):
        k, i = np.argwhere(field.values[:, K] > young + tol * scale)[0]
        report.young_bound_ok = False
        raise PropertyViolation('young_bound', (float(field.t_grid[k]), int(K[i])))

    eps = float(field.t_grid[0])
    report.lipschitz_constant = lipschitz_constant(field.L, e, eps)
    if field.t_grid.size > 1 and K.size:
        dq = np.abs(np.diff(field.values[:, K], axis=0)) / np.diff(field.t_grid)[:, None]
        report.lipschitz_observed = float(dq.max())
    if not report.lipschitz_ok:
        logger.info(f"t 方向差商 {report.lipschitz_observed:.6g} 超过常数 {report.lipschitz_constant:.6g}")
    return report


# ========== 渐近陡度 ==========

@dataclass
class SteepnessEstimate:
    """asymptotic_steepness 的结果"""
    value: float
    per_radius: List[Tuple[float, float]]
    excluded: List[float]
    inconclusive: bool = False

    def to_report(self) -> Dict[str, Any]:
        return {
            'value': self.value,
            'per_radius': [[r, v] for r, v in self.per_radius],
            'excluded': self.excluded,
            'inconclusive': self.inconclusive,
        }


def _ball_mask(M: SpacetimeModel, points: Sequence[Any], y: Any, r: float) -> np.ndarray:
    """E ∩ Ball(y, r)：Minkowski 取坐标欧氏球，有限因果空间取时间函数差 ≤ r"""
    if M.supports_geometry:
        X = np.array([x.coords if isinstance(x, Event) else x for x in points], dtype=float)
        c = np.asarray(y.coords if isinstance(y, Event) else y, dtype=float)
        return np.linalg.norm(X - c, axis=1) <= r
    tau = M.time_function(list(points))
    ty = float(M.time_function([y])[0])
    return np.abs(tau - ty) <= r


def asymptotic_steepness(M: SpacetimeModel, points: Sequence[Any], f: Sequence[float], y: Any,
                         radii: Sequence[float], strict: bool = False,
                         ell: Optional[np.ndarray] = None) -> SteepnessEstimate:
    """st_a f(y) 的离散估计：各半径球内陡度的最大值

    没有类时点对的半径贡献 +∞，默认排除；strict=True 时保留并标记为 inconclusive。

    Raises:
        NoTimelikePair: 所有半径都没有类时点对
    """
    pts = list(points)
    vals = np.asarray(f, dtype=float)
    if ell is None:
        ell = M.ell_matrix(pts, pts)
    per_radius: List[Tuple[float, float]] = []
    excluded: List[float] = []
    for r in sorted((float(r) for r in radii), reverse=True):
        mask = _ball_mask(M, pts, y, r)
        idx = np.flatnonzero(mask & np.isfinite(vals))
        st = steepness(M, [pts[i] for i in idx], vals[idx], ell[np.ix_(idx, idx)])
        per_radius.append((r, st))
        if math.isinf(st):
            excluded.append(r)
    usable = [v for _, v in per_radius if not math.isinf(v)]
    if not usable:
        raise NoTimelikePair(min(float(r) for r in radii))
    value = max(usable)
    inconclusive = False
    if strict and excluded:
        value = math.inf
        inconclusive = True
    return SteepnessEstimate(value, per_radius, excluded, inconclusive)


# ========== Hamilton–Jacobi 不等式 ==========

def hj_tolerance(h: float, t: float, derivative: float, scale: float) -> float:
    """tol(h) = 1e−9·max(1,|Q|) + h·(1 + |dQ/dt|)/t

    第二项对应差分的 O(h) 截断误差，t^{1−p} 的二阶导按 1/t 缩放。
    """
    return 1e-9 * max(1.0, scale) + h * (1.0 + abs(derivative)) / t


@dataclass
class HJRow:
    t: float
    y: int
    q: float
    argmax: int
    lmax: float
    st_a: float
    derivative: float
    hj_slack: float
    tol: float
    bound_ok: Optional[bool]
    derivative_bound: float
    derivative_slack: float
    ok: bool
    inconclusive: bool = False


@dataclass
class HJReport:
    rows: List[HJRow] = dataclasses.field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows if not r.inconclusive)

    @property
    def min_slack(self) -> float:
        vals = [r.hj_slack for r in self.rows if not r.inconclusive and math.isfinite(r.hj_slack)]
        return min(vals) if vals else math.inf

    def to_report(self) -> Dict[str, Any]:
        return {
            'ok': self.ok,
            'min_slack': self.min_slack,
            'rows': [vars(r) for r in self.rows],
        }


def derivative_lower_bound(lmax: float, t: float, e: Exponent) -> float:
    """d/dt Q_t f(y) ≥ −(1/q)·(L_max/t)^p"""
    if lmax <= 0:
        return 0.0 if e.p > 0 else -math.inf
    return -(1.0 / e.q) * (lmax / t) ** e.p


def check_hj_inequality(field: HopfLaxField, e: Optional[Exponent] = None, h: float = 1e-4,
                        radii: Sequence[float] = (1.0, 0.5, 0.25, 0.125),
                        strict: bool = False) -> HJReport:
    """诊断性核验 d/dt Q_t f(y) + u_q(st_a(Q_t f)(y)) ≥ −tol(h)

    导数用前向差分 (Q_{t+h} − Q_t)/h，Q_{t+h} 直接按定义重算（t+h 可略超 1）；
    并列最大化元处前向差分取到增长最快的分支。
    同时核对 st_a(Q_t f)(y) ≥ (L_max/t)^{p−1} 与导数下界 −(1/q)(L_max/t)^p。
    只检查 K 中的点；最大化元只有 y 自身（L_max ≤ 0）或球内没有类时点对的行
    记为 inconclusive，不计入 ok。
    """
    e = e or field.exponent
    q_exp = e.conjugate
    report = HJReport()
    for k, t in enumerate(field.t_grid):
        t = float(t)
        Qt = field.values[k]
        Qnext = _q_columns(field.f, field.ell, t + h, e)[0]
        for j in field.interior:
            q = float(Qt[j])
            if not math.isfinite(q) or not math.isfinite(Qnext[j]):
                continue
            deriv = (float(Qnext[j]) - q) / h
            lm = float(field.lmax[k, j])
            tol = hj_tolerance(h, t, deriv, abs(q))
            try:
                est = asymptotic_steepness(field.model, field.points, Qt, field.points[j], radii,
                                           strict=strict, ell=field.ell)
                st_a, inconclusive = est.value, est.inconclusive
            except NoTimelikePair:
                st_a, inconclusive = math.inf, True
            if lm <= 0:
                inconclusive = True
            if inconclusive:
                slack = math.inf
            else:
                slack = deriv + float(u_p(q_exp, st_a))
            bound_ok: Optional[bool] = None
            if lm > 0 and not inconclusive:
                bound_ok = st_a >= (lm / t) ** (e.p - 1.0) * (1.0 - 1e-9)
            dbound = derivative_lower_bound(lm, t, e)
            dslack = deriv - dbound
            ok = (inconclusive or slack >= -tol) and dslack >= -tol
            report.rows.append(HJRow(t, int(j), q, int(field.argmax[k, j]), lm, st_a, deriv, slack,
                                     tol, bound_ok, dbound, dslack, ok, inconclusive))
    if not report.ok:
        bad = [(r.t, r.y) for r in report.rows if not r.ok and not r.inconclusive]
        logger.warning(f"HJ 不等式诊断未通过: {bad[:5]}")
    return report


# ========== 两点闭式解 ==========

@dataclass(frozen=True)
class TwoPointHJ:
    """两点集 {x ≪ y} 上的解析量"""
    q: float
    derivative: float
    st_a: float
    residual: float


def two_point_identity(ell: float, f_x: float, t: float, e: Exponent) -> TwoPointHJ:
    """Q_t f(y) = f(x) + t^{1−p}u_p(ℓ)，导数 (1−p)t^{−p}u_p(ℓ)，陡度 (ℓ/t)^{p−1}

    u_q((ℓ/t)^{p−1}) = −(1−p)t^{−p}u_p(ℓ) 使残差恒为 0。
    """
    if not ell > 0:
        raise ValueError(f"两点闭式解要求 ℓ > 0: {ell}")
    up = float(u_p(e, ell))
    q = f_x + t ** (1.0 - e.p) * up
    deriv = (1.0 - e.p) * t ** (-e.p) * up
    st = (ell / t) ** (e.p - 1.0)
    residual = deriv + float(u_p(e.conjugate, st))
    return TwoPointHJ(q, deriv, st, residual)
