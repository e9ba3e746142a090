# -*- coding: utf-8 -*-
"""
__init__.py for src.core package

- utils: 版本/路径、±∞ 的 JSON 令牌编解码
- errors: 领域异常层次
- log: 日志初始化
- i18n: 报告标签的中英文翻译
"""
from .utils import (
    get_app_dir,
    get_app_version,
    get_app_title,
    encode_real,
    decode_real,
    encode_tree,
    NEG_INF_TOKEN,
    POS_INF_TOKEN,
)
from .errors import (
    CausalOTError,
    CapabilityMissing,
    CCIPrereqFailed,
    DimensionMismatch,
    DomainMismatch,
    DualityGap,
    InvalidCurve,
    InvalidEvent,
    InvalidExponent,
    InvalidMeasure,
    InvalidModel,
    InvalidPlan,
    InvalidVelocity,
    NoTimelikePair,
    NonCausalCovector,
    NotCausallyRelated,
    OffGridTime,
    ProblemFileError,
    PropertyViolation,
    UnknownLabel,
)
from .log import setup_logging, resolve_level, LOG_ENV_VAR
from .i18n import I18n, t, set_language, LANG_ZH_CN, LANG_EN_US

__all__ = [
    'get_app_dir',
    'get_app_version',
    'get_app_title',
    'encode_real',
    'decode_real',
    'encode_tree',
    'NEG_INF_TOKEN',
    'POS_INF_TOKEN',
    # 异常
    'CausalOTError',
    'CapabilityMissing',
    'CCIPrereqFailed',
    'DimensionMismatch',
    'DomainMismatch',
    'DualityGap',
    'InvalidCurve',
    'InvalidEvent',
    'InvalidExponent',
    'InvalidMeasure',
    'InvalidModel',
    'InvalidPlan',
    'InvalidVelocity',
    'NoTimelikePair',
    'NonCausalCovector',
    'NotCausallyRelated',
    'OffGridTime',
    'ProblemFileError',
    'PropertyViolation',
    'UnknownLabel',
    # 日志
    'setup_logging',
    'resolve_level',
    'LOG_ENV_VAR',
    # 多语言
    'I18n',
    't',
    'set_language',
    'LANG_ZH_CN',
    'LANG_EN_US',
]
