# -*- coding: utf-8 -*-
"""
问题文件（ProblemFile）解析

所有子命令共用一种 JSON 格式，各段按需出现：
    {"spacetime": {...}, "p": 0.5, "mu0": {...}, "mu1": {...},
     "path"?: {...}, "lifted"?: {...}, "velocities"?: {...},
     "field"?: {"points": [...], "f": [...], "L": 1.0, "t_grid"?: [...], "interior"?: [...]},
     "grid"?: {"n": 17}, "tolerances"?: {...}}
解析与模式错误统一抛出带行号的 ProblemFileError。
"""
import dataclasses
import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from src.core.errors import CausalOTError, ProblemFileError
from src.core.utils import decode_real
from src.geometry.spacetime import SpacetimeModel, model_from_spec
from src.measures.discrete import DiscreteMeasure, measure_from_spec
from src.measures.paths import LiftedPlan, MeasurePath, lifted_from_spec, path_from_spec
from src.transport.utility import Exponent

logger = logging.getLogger(__name__)

KNOWN_KEYS = ('spacetime', 'p', 'mu0', 'mu1', 'path', 'lifted', 'velocities', 'field', 'grid', 'tolerances')


def _line_of(text: str, key: str) -> Optional[int]:
    """键 "key" 第一次出现的行号（从 1 开始）"""
    match = re.search(r'"' + re.escape(key) + r'"\s*:', text)
    if not match:
        return None
    return text.count('\n', 0, match.start()) + 1


@dataclass
class FieldSection:
    """Hopf–Lax 段：有限集 E、f、声称的陡度 L"""
    points: List[Any]
    f: np.ndarray
    L: float
    t_grid: Optional[List[float]] = None
    interior: Optional[List[int]] = None


@dataclass
class ProblemFile:
    """解析后的问题文件；可选段未给出时为 None"""
    model: SpacetimeModel
    exponent: Optional[Exponent] = None
    mu0: Optional[DiscreteMeasure] = None
    mu1: Optional[DiscreteMeasure] = None
    path: Optional[MeasurePath] = None
    lifted: Optional[LiftedPlan] = None
    velocities: Optional[Dict[str, Any]] = None
    field: Optional[FieldSection] = None
    grid: Optional[int] = None
    tolerances: Dict[str, float] = dataclasses.field(default_factory=dict)
    source: Optional[Path] = None
    text: str = ''

    def require(self, *names: str) -> None:
        """确认子命令需要的段都在

        Raises:
            ProblemFileError: 缺少某段
        """
        for name in names:
            if getattr(self, name) is None:
                raise ProblemFileError(f"问题文件缺少必需的段: {_section_key(name)}")

    def velocity_series(self):
        """按模型解析 velocities 段（延迟到 dynamics 模块）"""
        from src.dynamics.interpolation import velocities_from_spec

        self.require('velocities')
        assert self.velocities is not None
        return _guarded(self.text, 'velocities', lambda: velocities_from_spec(self.velocities, self.model))


def _section_key(name: str) -> str:
    return 'p' if name == 'exponent' else name


def _guarded(text: str, key: str, build):
    """执行 build()，把解析/模式错误转成定位到 key 的 ProblemFileError"""
    try:
        return build()
    except ProblemFileError:
        raise
    except (CausalOTError, KeyError, TypeError, ValueError, IndexError) as e:
        detail = f"缺少字段 {e}" if isinstance(e, KeyError) else str(e)
        raise ProblemFileError(f"段 {key!r} 无效: {detail}", _line_of(text, key)) from e


def _parse_field(spec: Dict[str, Any], M: SpacetimeModel) -> FieldSection:
    points = [M.validate_point(x) for x in spec['points']]
    f = np.asarray([decode_real(v) for v in spec['f']], dtype=float)
    if f.size != len(points):
        raise ValueError(f"f 的长度 {f.size} 与点数 {len(points)} 不符")
    t_grid = [float(t) for t in spec['t_grid']] if 't_grid' in spec else None
    interior = [int(i) for i in spec['interior']] if 'interior' in spec else None
    return FieldSection(points, f, float(spec['L']), t_grid, interior)


def parse_problem(text: str, source: Optional[Path] = None) -> ProblemFile:
    """解析问题文件文本

    Args:
        text: JSON 文本
        source: 来源路径（仅用于日志）

    Returns:
        ProblemFile

    Raises:
        ProblemFileError: JSON 语法错误或模式错误，message 带行号
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProblemFileError(f"JSON 语法错误: {e.msg}", e.lineno) from e
    if not isinstance(raw, dict):
        raise ProblemFileError("问题文件顶层必须是对象", 1)
    unknown = [k for k in raw if k not in KNOWN_KEYS]
    if unknown:
        raise ProblemFileError(f"未知的段: {unknown[0]!r}", _line_of(text, unknown[0]))
    if 'spacetime' not in raw:
        raise ProblemFileError("问题文件缺少必需的段: spacetime", 1)

    M = _guarded(text, 'spacetime', lambda: model_from_spec(raw['spacetime']))
    problem = ProblemFile(model=M, source=source, text=text)
    if 'p' in raw:
        problem.exponent = _guarded(text, 'p', lambda: Exponent(decode_real(raw['p'])))
    for key in ('mu0', 'mu1'):
        if key in raw:
            setattr(problem, key, _guarded(text, key, lambda k=key: measure_from_spec(raw[k], M)))
    if 'path' in raw:
        problem.path = _guarded(text, 'path', lambda: path_from_spec(raw['path'], M))
    if 'lifted' in raw:
        problem.lifted = _guarded(text, 'lifted', lambda: lifted_from_spec(raw['lifted'], M))
    if 'velocities' in raw:
        if not isinstance(raw['velocities'], dict):
            raise ProblemFileError("段 'velocities' 必须是对象", _line_of(text, 'velocities'))
        problem.velocities = raw['velocities']
    if 'field' in raw:
        problem.field = _guarded(text, 'field', lambda: _parse_field(raw['field'], M))
    if 'grid' in raw:
        problem.grid = _guarded(text, 'grid', lambda: _parse_grid(raw['grid']))
    if 'tolerances' in raw:
        problem.tolerances = _guarded(text, 'tolerances',
                                      lambda: {str(k): float(v) for k, v in raw['tolerances'].items()})
    logger.debug(f"已解析问题文件 {source or '<text>'}: 段 {sorted(raw)}")
    return problem


def _parse_grid(spec: Union[int, Dict[str, Any]]) -> int:
    n = spec['n'] if isinstance(spec, dict) else spec
    if isinstance(n, bool) or not isinstance(n, int) or n < 2:
        raise ValueError(f"grid.n 必须是 ≥ 2 的整数: {n!r}")
    return n


def load_problem(path: Union[str, Path]) -> ProblemFile:
    """读取并解析问题文件

    Raises:
        ProblemFileError: 文件无法读取或解析失败
    """
    p = Path(path)
    try:
        text = p.read_text(encoding='utf-8')
    except OSError as e:
        raise ProblemFileError(f"无法读取问题文件 {p}: {e}") from e
    return parse_problem(text, p)


def problem_to_spec(model: SpacetimeModel, p: Optional[float] = None,
                    mu0: Optional[DiscreteMeasure] = None, mu1: Optional[DiscreteMeasure] = None,
                    grid: Optional[int] = None, **sections: Any) -> Dict[str, Any]:
    """由对象生成问题文件字典（生成随机实例时使用）"""
    spec: Dict[str, Any] = {'spacetime': model.to_spec()}
    if p is not None:
        spec['p'] = p
    if mu0 is not None:
        spec['mu0'] = mu0.to_spec()
    if mu1 is not None:
        spec['mu1'] = mu1.to_spec()
    if grid is not None:
        spec['grid'] = {'n': grid}
    for key, value in sections.items():
        if key not in KNOWN_KEYS:
            raise KeyError(key)
        spec[key] = value.to_spec() if hasattr(value, 'to_spec') else value
    return spec


def dump_problem(spec: Dict[str, Any]) -> str:
    """问题字典 → JSON 文本（±∞ 用字符串令牌）"""
    from src.core.utils import encode_tree

    return json.dumps(encode_tree(spec), indent=2, ensure_ascii=False)

