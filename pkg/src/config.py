# -*- coding: utf-8 -*-
"""
配置管理模块

负责配置文件的加载、保存和默认值生成。
容差、网格规模、随机种子、并发数、语言和日志级别都从这里取；
命令行参数通过 apply_overrides() 覆盖。
"""
import copy
import json
import logging
from pathlib import Path
from typing import Dict, Any, Optional

logger = logging.getLogger(__name__)


class ConfigManager:
    """配置管理器"""

    DEFAULT_CONFIG = {
        # 数值容差
        'tolerances': {
            'marginal': 1e-10,      # 计划边缘
            'duality': 1e-9,        # 原始/对偶间隙（相对 max(1,|primal|)）
            'weight_sum': 1e-12,    # 测度总质量
            'bb_gap': 1e-8,         # 静态/动态间隙
            'kuwada': 1e-8,
            'cci': 1e-9,            # CCI 残差的常数项
            'steepness': 1e-9,
            'tie': 1e-12,           # Hopf–Lax 最大化元并列判定
        },
        # 时间网格点数（2^k + 1）
        'grid': 17,
        'seed': 0,
        'jobs': 1,
        'language': 'zh_CN',
        'log_level': 'WARNING',
        'log_to_file': False,
        # 陡化技巧的 ε 序列
        'steepening_eps': [0.1, 0.01, 0.001],
        'hopflax': {
            't_grid': [0.125, 0.25, 0.5, 1.0],
            'radii': [1.0, 0.5, 0.25, 0.125],
            'strict_radii': False,
            'hj_step': 1e-4,
        },
        'cci_battery': {
            'random_covectors': 10,
            'ramp_breakpoints': [0.0, 2.0],
            'ramp_height': 1.0,
        },
    }

    def __init__(self, config_path: Path):
        """初始化配置管理器

        Args:
            config_path: 配置文件路径
        """
        self.config_path = config_path
        self._config: Dict[str, Any] = copy.deepcopy(self.DEFAULT_CONFIG)

    @staticmethod
    def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
        """递归合并配置，确保保留默认值且不污染全局默认配置。"""
        result = copy.deepcopy(base)
        for key, value in override.items():
            if isinstance(value, dict) and isinstance(result.get(key), dict):
                result[key] = ConfigManager._deep_merge(result[key], value)
            else:
                result[key] = copy.deepcopy(value)
        return result

    def load(self) -> Dict[str, Any]:
        """加载配置文件

        文件不存在时写出默认配置；已存在时与默认值深度合并，缺失的键回写。

        Returns:
            配置字典
        """
        if not self.config_path.exists():
            self._config = copy.deepcopy(self.DEFAULT_CONFIG)
            self.save(self._config)
            return copy.deepcopy(self._config)

        try:
            with open(self.config_path, 'r', encoding='utf-8') as f:
                loaded_config = json.load(f)

            merged_config = self._deep_merge(self.DEFAULT_CONFIG, loaded_config)
            self._config = merged_config
            if merged_config != loaded_config:
                self.save(merged_config)
            return copy.deepcopy(self._config)
        except Exception as e:
            logger.warning(f"配置加载失败，使用默认配置: {e}")
            self._config = copy.deepcopy(self.DEFAULT_CONFIG)
            return copy.deepcopy(self._config)

    def save(self, config: Dict[str, Any]) -> bool:
        """保存配置文件

        Args:
            config: 要保存的配置字典

        Returns:
            是否保存成功
        """
        try:
            self.config_path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.config_path, 'w', encoding='utf-8') as f:
                json.dump(config, f, indent=2, ensure_ascii=False)

            self._config = copy.deepcopy(config)
            return True
        except Exception as e:
            logger.warning(f"配置保存失败: {e}")
            return False

    def get(self, key: str, default: Any = None) -> Any:
        """获取配置项

        Args:
            key: 配置键
            default: 默认值

        Returns:
            配置值
        """
        return self._config.get(key, default)

    def set(self, key: str, value: Any) -> None:
        """设置配置项

        Args:
            key: 配置键
            value: 配置值
        """
        self._config[key] = value

    def tolerance(self, name: str) -> float:
        """取某项容差，未配置时退回默认值"""
        tolerances = self._config.get('tolerances', {})
        if name in tolerances:
            return float(tolerances[name])
        return float(self.DEFAULT_CONFIG['tolerances'][name])

    def apply_overrides(self, tol: Optional[float] = None, grid: Optional[int] = None,
                        seed: Optional[int] = None, jobs: Optional[int] = None,
                        language: Optional[str] = None,
                        tolerances: Optional[Dict[str, float]] = None) -> None:
        """用命令行参数或问题文件覆盖当前配置（不写回文件）

        Args:
            tol: 统一覆盖 duality/bb_gap/kuwada/cci 四项容差
            grid: 时间网格点数
            seed: 随机种子
            jobs: 并发实例数
            language: 报告语言
            tolerances: 按名覆盖的容差
        """
        if tolerances:
            self._config = self._deep_merge(self._config, {'tolerances': tolerances})
        if tol is not None:
            self._config = self._deep_merge(self._config, {'tolerances': {
                'duality': tol, 'bb_gap': tol, 'kuwada': tol, 'cci': tol,
            }})
        if grid is not None:
            self._config['grid'] = int(grid)
        if seed is not None:
            self._config['seed'] = int(seed)
        if jobs is not None:
            self._config['jobs'] = max(1, int(jobs))
        if language:
            self._config['language'] = language

    def snapshot(self) -> Dict[str, Any]:
        """当前生效配置的深拷贝"""
        return copy.deepcopy(self._config)

    def copy(self) -> 'ConfigManager':
        """同一路径、独立生效配置的副本；批量实例各自覆盖容差时互不影响"""
        clone = ConfigManager(self.config_path)
        clone._config = self.snapshot()
        return clone

    @staticmethod
    def get_default_config() -> Dict[str, Any]:
        """获取默认配置

        Returns:
            默认配置字典
        """
        return copy.deepcopy(ConfigManager.DEFAULT_CONFIG)
