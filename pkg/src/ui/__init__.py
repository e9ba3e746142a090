# -*- coding: utf-8 -*-
"""
UI 模块 - 命令行界面

包含：
- commands.py: 子命令解析与分发
- render.py: 表格与序列排版
"""

from .commands import (
    EXIT_INFEASIBLE, EXIT_OK, EXIT_PARSE, EXIT_VIOLATION,
    CommandOutcome, build_parser, execute, run,
)
from .render import format_value, render_report, render_series, render_table

__all__ = [
    'EXIT_OK', 'EXIT_PARSE', 'EXIT_INFEASIBLE', 'EXIT_VIOLATION',
    'CommandOutcome', 'build_parser', 'execute', 'run',
    'format_value', 'render_report', 'render_series', 'render_table',
]
