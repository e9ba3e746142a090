# -*- coding: utf-8 -*-
"""
Geometry 模块 - 时空模型

包含：
- spacetime.py: Minkowski 与有限因果空间、时间分离、因果范数
- emerald.py: 因果菱形与欧氏长度界
- sampling.py: 随机因果向量/事件/测度
"""

from .spacetime import (
    Relation, Event, CausalVector, CausalCovector, SpacetimeModel, Minkowski, FiniteCausal,
    causally_related, time_separation, norm_g, dual_norm, geodesic_point, model_from_spec,
)
from .emerald import Diamond, bounding_emerald, euclidean_length_bound, polyline_length, emerald_contains

__all__ = [
    'Relation', 'Event', 'CausalVector', 'CausalCovector',
    'SpacetimeModel', 'Minkowski', 'FiniteCausal',
    'causally_related', 'time_separation', 'norm_g', 'dual_norm', 'geodesic_point', 'model_from_spec',
    'Diamond', 'bounding_emerald', 'euclidean_length_bound', 'polyline_length', 'emerald_contains',
]
