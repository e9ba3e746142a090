# -*- coding: utf-8 -*-
"""
报告输出：JSON（稳定排序、±∞ 令牌）与 CSV 时间序列
"""
import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

from src.core.utils import NEG_INF_TOKEN, POS_INF_TOKEN, encode_tree

logger = logging.getLogger(__name__)


def dumps_report(report: Dict[str, Any]) -> str:
    """报告 → JSON 文本；键排序，同一平台上逐位稳定"""
    return json.dumps(encode_tree(report), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False)


def _decode_tree(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {k: _decode_tree(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decode_tree(v) for v in obj]
    if obj == NEG_INF_TOKEN:
        return -math.inf
    if obj == POS_INF_TOKEN:
        return math.inf
    return obj


def loads_report(text: str) -> Dict[str, Any]:
    """JSON 报告 → 字典，"-inf"/"inf" 令牌还原为浮点"""
    return _decode_tree(json.loads(text))


def write_report(path: Path, report: Dict[str, Any]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_report(report) + '\n', encoding='utf-8')
    logger.info(f"报告已写入: {path}")
    return path


def _cell(value: Any) -> Any:
    if value is None:
        return ''
    if isinstance(value, float) and math.isinf(value):
        return NEG_INF_TOKEN if value < 0 else POS_INF_TOKEN
    return value


def write_csv(path: Path, rows: Sequence[Dict[str, Any]], columns: Optional[List[str]] = None) -> Path:
    """字典行写成 CSV；列顺序取 columns 或第一次出现的顺序，缺失值留空

    Args:
        path: 输出文件
        rows: 行
        columns: 显式列名
    """
    if columns is None:
        columns = []
        for row in rows:
            for key in row:
                if key not in columns:
                    columns.append(key)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        w = csv.writer(f)
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(row.get(c)) for c in columns])
    logger.info(f"CSV 已写入: {path}（{len(rows)} 行）")
    return path


def read_csv(path: Path) -> List[Dict[str, str]]:
    with open(path, newline='', encoding='utf-8') as f:
        return list(csv.DictReader(f))


def matrix_rows(matrix: Iterable[Sequence[float]], row_label: str = 'i',
                col_prefix: str = 'j') -> List[Dict[str, Any]]:
    """二维数组 → CSV 行（计划矩阵等）"""
    rows = []
    for i, row in enumerate(matrix):
        entry: Dict[str, Any] = {row_label: i}
        for j, v in enumerate(row):
            entry[f"{col_prefix}{j}"] = v
        rows.append(entry)
    return rows
