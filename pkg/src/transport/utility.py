# -*- coding: utf-8 -*-
"""
效用函数 u_p 与指数算术

u_p(z) = z^p / p（z > 0），边界约定：
- z < 0：−∞（任意 p）
- z = 0：p < 0 时 −∞，p ∈ (0,1) 时 0
- z = +∞：p < 0 时 0，p ∈ (0,1) 时 +∞
"""
import math
from dataclasses import dataclass

import numpy as np

from src.core.errors import InvalidExponent


@dataclass(frozen=True)
class Exponent:
    """指数 p（p < 1, p ≠ 0）及其 Hölder 共轭 q = p/(p−1)"""
    p: float

    def __post_init__(self):
        p = float(self.p)
        if not math.isfinite(p) or p >= 1 or p == 0:
            raise InvalidExponent(f"指数必须满足 p < 1 且 p ≠ 0: {self.p}")
        object.__setattr__(self, 'p', p)

    @property
    def q(self) -> float:
        return conjugate(self.p)

    @property
    def conjugate(self) -> 'Exponent':
        return Exponent(self.q)

    @property
    def negative(self) -> bool:
        return self.p < 0

    def __str__(self):
        return f"p={self.p:g}"


def conjugate(p: float) -> float:
    """Hölder 共轭 q = p/(p−1)，满足 1/p + 1/q = 1"""
    return p / (p - 1.0)


def u_p(e: Exponent, z):
    """效用函数，标量或 numpy 数组均可

    Args:
        e: 指数
        z: 实数或数组，可含 ±∞

    Returns:
        与输入同形的 u_p(z)
    """
    p = e.p
    arr = np.asarray(z, dtype=float)
    out = np.full(arr.shape, -math.inf)
    pos = arr > 0
    finite_pos = pos & np.isfinite(arr)
    with np.errstate(over='ignore', divide='ignore'):
        out[finite_pos] = np.power(arr[finite_pos], p) / p
    out[np.isposinf(arr)] = 0.0 if p < 0 else math.inf
    if p > 0:
        out[arr == 0] = 0.0
    if out.ndim == 0:
        return float(out)
    return out


def u_p_inverse(e: Exponent, value):
    """u_p 的逆：ℓ = (p·value)^{1/p}

    p ∈ (0,1)：value ∈ [0, +∞]，value = 0 ↦ 0；
    p < 0：value ∈ [−∞, 0]，value = −∞ ↦ 0，value = 0 ↦ +∞；
    范围外（u_p 取不到的值）返回 −∞。
    """
    p = e.p
    arr = np.asarray(value, dtype=float)
    out = np.full(arr.shape, -math.inf)
    if p > 0:
        ok = arr >= 0
        with np.errstate(over='ignore'):
            out[ok] = np.power(p * arr[ok], 1.0 / p)
    else:
        out[np.isneginf(arr)] = 0.0
        mid = (arr < 0) & np.isfinite(arr)
        with np.errstate(over='ignore'):
            out[mid] = np.power(p * arr[mid], 1.0 / p)
        out[arr == 0] = math.inf
    if out.ndim == 0:
        return float(out)
    return out
