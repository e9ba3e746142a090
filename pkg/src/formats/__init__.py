# -*- coding: utf-8 -*-
"""
Formats 模块 - 问题文件与报告的编解码

包含：
- problem.py: 问题文件解析（带行号的错误）
- report.py: JSON 报告与 CSV 时间序列
"""

from .problem import FieldSection, ProblemFile, parse_problem, load_problem, problem_to_spec, dump_problem
from .report import dumps_report, loads_report, write_report, write_csv, read_csv, matrix_rows

__all__ = [
    'FieldSection', 'ProblemFile', 'parse_problem', 'load_problem', 'problem_to_spec', 'dump_problem',
    'dumps_report', 'loads_report', 'write_report', 'write_csv', 'read_csv', 'matrix_rows',
]
