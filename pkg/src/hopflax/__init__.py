# -*- coding: utf-8 -*-
"""
Hopflax 模块 - 有限点集上的 Hopf–Lax 半群

包含：
- semigroup.py: Q_t^p、最大化元、半群性质、渐近陡度与 HJ 不等式检查
- fixtures.py: 链、折线、梯子与菱形内随机采样的测试场
"""

from .semigroup import (
    QEval, q_eval, q_eval_detail, HopfLaxField, maximizer_bound, check_maximizer_bound,
    lipschitz_constant, SemigroupReport, check_semigroup_properties,
    SteepnessEstimate, asymptotic_steepness, HJReport, check_hj_inequality, two_point_identity,
)

__all__ = [
    'QEval', 'q_eval', 'q_eval_detail', 'HopfLaxField', 'maximizer_bound', 'check_maximizer_bound',
    'lipschitz_constant', 'SemigroupReport', 'check_semigroup_properties',
    'SteepnessEstimate', 'asymptotic_steepness', 'HJReport', 'check_hj_inequality', 'two_point_identity',
]
