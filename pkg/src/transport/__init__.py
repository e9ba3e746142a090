# -*- coding: utf-8 -*-
"""
Transport 模块 - 静态 p-Lorentz–Wasserstein 问题

包含：
- utility.py: 指数与效用函数 u_p
- feasibility.py: μ ⪯ ν 的最大流判定
- simplex.py: 运输单纯形法
- solver.py: 原问题精确求解与对偶势
- duality.py: c_p 变换、陡度与对偶性核验
- oracles.py: 测试用的独立预言机
"""

from .utility import Exponent, conjugate, u_p, u_p_inverse
from .feasibility import Feasible, Infeasible, feasible
from .solver import PotentialPair, SolveResult, cost_matrix, solve_primal
from .duality import cp_transform_fwd, cp_transform_bwd, steepness, DualityReport, verify_duality

__all__ = [
    'Exponent', 'conjugate', 'u_p', 'u_p_inverse',
    'Feasible', 'Infeasible', 'feasible',
    'PotentialPair', 'SolveResult', 'cost_matrix', 'solve_primal',
    'cp_transform_fwd', 'cp_transform_bwd', 'steepness', 'DualityReport', 'verify_duality',
]
