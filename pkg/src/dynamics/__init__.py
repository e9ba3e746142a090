# -*- coding: utf-8 -*-
"""
Dynamics 模块 - 动态问题

包含：
- interpolation.py: 测地位移插值、重心速度场
- cci.py: 因果连续性不等式检查
- benamou_brenier.py: 动态作用量、Kuwada 方向、Benamou–Brenier 核验
"""

from .interpolation import (
    VelocitySeries, velocities_from_spec, geodesic_path, barycentric_velocity,
    merge_counts, support_contained, crossing_lifting,
)
from .cci import Ramp, TestFunction, linear, ramp_composite, standard_battery, CCIReport, check_cci, refinement_ratio
from .benamou_brenier import (
    clamped_norms, dynamic_action, KuwadaReport, check_kuwada_direction,
    DualBound, kuwada_dual_bound, BBReport, verify_benamou_brenier,
)

__all__ = [
    'VelocitySeries', 'velocities_from_spec', 'geodesic_path', 'barycentric_velocity',
    'merge_counts', 'support_contained', 'crossing_lifting',
    'Ramp', 'TestFunction', 'linear', 'ramp_composite', 'standard_battery',
    'CCIReport', 'check_cci', 'refinement_ratio',
    'clamped_norms', 'dynamic_action', 'KuwadaReport', 'check_kuwada_direction',
    'DualBound', 'kuwada_dual_bound', 'BBReport', 'verify_benamou_brenier',
]
