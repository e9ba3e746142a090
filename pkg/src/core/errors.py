# -*- coding: utf-8 -*-
"""
领域异常模块

所有库内异常都继承自 CausalOTError，命令行层据此区分
"输入错误"（退出码 1）与"性质违例"（退出码 3）。

不可行性不是异常：feasible()/solve_primal() 以 Infeasible 结果值返回。
"""
from typing import Any, Dict, Optional


class CausalOTError(Exception):
    """库内所有异常的基类"""


class DimensionMismatch(CausalOTError):
    """事件/向量维度与时空模型不一致"""


class UnknownLabel(CausalOTError):
    """有限因果空间中不存在的点标签"""


class InvalidEvent(CausalOTError):
    """事件坐标含 NaN 或 ±∞"""


class InvalidModel(CausalOTError):
    """时空模型构造失败（ℓ 矩阵不满足偏序或反向三角不等式等）"""


class NotCausallyRelated(CausalOTError):
    """要求 x ≤ y 的操作收到了非因果相关的点对"""


class CapabilityMissing(CausalOTError):
    """当前时空模型不支持该操作（例如有限因果空间上的测地线）"""


class NonCausalCovector(CausalOTError):
    """余向量在某个未来因果向量上取负值"""


class InvalidMeasure(CausalOTError):
    """离散测度不合法（权重非正、总和不为 1 等）"""


class InvalidPlan(CausalOTError):
    """运输计划不合法（边缘不符或支撑在非因果点对上）"""


class InvalidCurve(CausalOTError):
    """采样曲线不合法（时间网格不递增或相邻点非因果）"""


class OffGridTime(CausalOTError):
    """请求的时间不在网格上"""


class InvalidExponent(CausalOTError):
    """指数 p 不满足 p < 1 且 p ≠ 0"""


class InvalidVelocity(CausalOTError):
    """速度场中出现非未来因果向量"""


class DomainMismatch(CausalOTError):
    """速度场定义域未覆盖路径测度的支撑，或网格不一致"""


class CCIPrereqFailed(CausalOTError):
    """Kuwada 方向检查的前置条件（因果连续性不等式）不成立"""


class DualityGap(CausalOTError):
    """对偶性核验失败

    Args:
        details: 失败项明细（检查名 → 数值）
    """

    def __init__(self, details: Dict[str, Any]):
        self.details = details
        failed = ', '.join(sorted(details.get('failed', []))) or '?'
        super().__init__(f"对偶性核验失败: {failed}")


class PropertyViolation(CausalOTError):
    """Hopf–Lax 半群等性质检查发现违例

    Args:
        which: 违例的性质名
        where: 违例位置（如 (t, y) 下标）
    """

    def __init__(self, which: str, where: Any = None):
        self.which = which
        self.where = where
        super().__init__(f"性质违例: {which} @ {where}")


class NoTimelikePair(CausalOTError):
    """某个半径内不存在类时点对，无法估计渐近陡度"""

    def __init__(self, radius: float):
        self.radius = radius
        super().__init__(f"半径 {radius} 内没有类时点对")


class ProblemFileError(CausalOTError):
    """问题文件解析/模式错误，附带行号

    Args:
        message: 错误描述
        line: 出错行号（从 1 开始），未知时为 None
    """

    def __init__(self, message: str, line: Optional[int] = None):
        self.message = message
        self.line = line
        where = f"第 {line} 行: " if line is not None else ""
        super().__init__(f"{where}{message}")
