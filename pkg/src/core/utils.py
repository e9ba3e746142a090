# -*- coding: utf-8 -*-
"""
通用工具函数模块

提供路径处理、版本号以及 ±∞ 的 JSON 令牌编解码
"""
import math
import sys
from pathlib import Path
from typing import Any

# 版本号单一来源
try:
    from src import __version__  # type: ignore  # 屏蔽类型检查在运行时动态导入
except Exception:
    __version__ = "0.0.0"

NEG_INF_TOKEN = "-inf"
POS_INF_TOKEN = "inf"


def get_app_dir() -> Path:
    """获取应用程序数据目录（用于配置和日志等可写文件）

    - 开发环境：返回项目根目录
    - 打包后：返回可执行文件所在目录

    Returns:
        Path: 应用程序数据目录
    """
    if getattr(sys, 'frozen', False):
        return Path(sys.executable).parent
    return Path(__file__).parent.parent.parent


def get_app_version() -> str:
    """获取版本号

    Returns:
        str: 版本号，如 "1.0.0"
    """
    return __version__


def get_app_title() -> str:
    """获取程序标题（用于 --version 与报告页眉）"""
    return f"causal-ot v{get_app_version()}"


def encode_real(value: float) -> Any:
    """把实数编码为 JSON 值，±∞ 写成字符串令牌

    NaN 不属于任何合法结果，原样交给 json 报错。
    """
    if isinstance(value, float) and math.isinf(value):
        return NEG_INF_TOKEN if value < 0 else POS_INF_TOKEN
    return value


def decode_real(value: Any) -> float:
    """把 JSON 值解码为实数，接受 "-inf"/"inf" 令牌

    Raises:
        ValueError: 既不是数也不是合法令牌
    """
    if isinstance(value, str):
        if value == NEG_INF_TOKEN:
            return -math.inf
        if value == POS_INF_TOKEN:
            return math.inf
        raise ValueError(f"非法实数令牌: {value!r}")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"期望实数，得到 {type(value).__name__}")
    return float(value)


def encode_tree(obj: Any) -> Any:
    """递归编码 dict/list 中的 ±∞"""
    if isinstance(obj, dict):
        return {k: encode_tree(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode_tree(v) for v in obj]
    if hasattr(obj, 'tolist'):
        return encode_tree(obj.tolist())
    return encode_real(obj)
