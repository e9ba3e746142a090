# -*- coding: utf-8 -*-
"""
Measures 模块 - 离散测度、因果计划与测度路径

包含：
- discrete.py: DiscreteMeasure、CausalPlan
- paths.py: SampledCurve、LiftedPlan、MeasurePath，路径速度与作用量
"""

from .discrete import DiscreteMeasure, CausalPlan, measure_from_spec
from .paths import (
    SampledCurve, LiftedPlan, MeasurePath, path_from_spec, lifted_from_spec, uniform_grid,
    marginal, curve_speed, path_speed, speed_profile, path_action, teleport_path, teleport_lifting,
)

__all__ = [
    'DiscreteMeasure', 'CausalPlan', 'measure_from_spec',
    'SampledCurve', 'LiftedPlan', 'MeasurePath', 'path_from_spec', 'lifted_from_spec', 'uniform_grid',
    'marginal', 'curve_speed', 'path_speed', 'speed_profile', 'path_action',
    'teleport_path', 'teleport_lifting',
]
