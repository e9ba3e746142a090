# -*- coding: utf-8 -*-
"""
人类可读输出

把各子命令的报告字典排成两列表格，标签走 i18n。
"""
import math
import unicodedata
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.core.i18n import t


def format_value(value: Any, digits: int = 10) -> str:
    """数值格式化：±∞ 写成 ±∞，浮点取有效数字，布尔走状态文案"""
    if value is None:
        return '—'
    if isinstance(value, bool):
        return t('status_ok') if value else t('status_failed')
    if isinstance(value, float):
        if math.isinf(value):
            return '−∞' if value < 0 else '+∞'
        if math.isnan(value):
            return 'NaN'
        return f"{value:.{digits}g}"
    if isinstance(value, (list, tuple)):
        inner = ', '.join(format_value(v, 6) for v in value[:8])
        return f"[{inner}{', …' if len(value) > 8 else ''}]"
    return str(value)


def _width(text: str) -> int:
    """终端显示宽度（全角字符记 2）"""
    return sum(2 if unicodedata.east_asian_width(c) in ('W', 'F') else 1 for c in text)


def _pad(text: str, width: int) -> str:
    return text + ' ' * max(0, width - _width(text))


def render_table(title: str, rows: Sequence[Tuple[str, Any]], status: Optional[str] = None) -> str:
    """两列表格

    Args:
        title: 标题
        rows: (i18n 键, 值) 列表；键找不到翻译时原样显示
        status: 末行状态文案
    """
    labels = [t(key, key) for key, _ in rows]
    values = [format_value(v) for _, v in rows]
    head = (t('col_name'), t('col_value'))
    w1 = max([_width(head[0])] + [_width(s) for s in labels])
    w2 = max([_width(head[1])] + [_width(s) for s in values])
    rule = '─' * (w1 + w2 + 3)
    lines = [title, rule, f"{_pad(head[0], w1)} │ {head[1]}", rule]
    for label, value in zip(labels, values):
        lines.append(f"{_pad(label, w1)} │ {value}")
    lines.append(rule)
    if status:
        lines.append(status)
    return '\n'.join(lines)


def status_text(ok: bool, infeasible: bool = False) -> str:
    if infeasible:
        return t('status_infeasible')
    return t('status_ok') if ok else t('status_failed')


def render_series(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    """多列序列（区间速度、HJ 行等）"""
    cells: List[List[str]] = [[t(h, h) for h in header]]
    cells += [[format_value(v, 8) for v in row] for row in rows]
    widths = [max(_width(r[i]) for r in cells) for i in range(len(header))]
    out = []
    for n, row in enumerate(cells):
        out.append('  '.join(_pad(c, w) for c, w in zip(row, widths)))
        if n == 0:
            out.append('  '.join('─' * w for w in widths))
    return '\n'.join(out)


def render_report(command: str, report: Dict[str, Any]) -> str:
    """按子命令挑选关键字段排版"""
    title = t(f"title_{command.split('-')[0]}", command)
    ok = bool(report.get('ok', True))
    infeasible = report.get('feasible') is False
    keys = _SUMMARY_KEYS.get(command, ())
    rows = [(k, report[k]) for k in keys if k in report]
    text = render_table(title, rows, status_text(ok, infeasible))
    if command == 'speed' and report.get('speeds'):
        series = [(k, s) for k, s in enumerate(report['speeds'])]
        text += '\n\n' + render_series(('interval', 'speed'), series)
    return text


_SUMMARY_KEYS: Dict[str, Tuple[str, ...]] = {
    'solve': ('p', 'value', 'ell_p', 'gap', 'cut'),
    'dual': ('primal', 'dual', 'gap', 'max_violation', 'failed'),
    'feasible': ('feasible', 'flow_value', 'cut', 'cut_mass'),
    'interpolate': ('p', 'ell_p', 'curves', 'merge_count', 'speeds', 'support_contained'),
    'speed': ('p', 'path_action'),
    'bb': ('p', 'static_value', 'dynamic_action', 'gap', 'merge_count', 'merge_slack', 'min_residual'),
    'hopflax': ('p', 'L', 'steepness', 'monotone', 'young_bound_ok', 'lipschitz', 'maximizer_bound',
                'hj_min_slack'),
    'cci-check': ('tests', 'min_residual', 'path_action', 'dynamic_action'),
}
