# -*- coding: utf-8 -*-
"""
日志初始化

级别优先级：显式参数 > 环境变量 CAUSAL_OT_LOG > 配置 log_level > WARNING。
给定日志目录时，额外写入按日期命名的文件 causal_ot_YYYYMMDD.txt。
"""
import datetime
import logging
import os
from pathlib import Path
from typing import Optional

LOG_ENV_VAR = 'CAUSAL_OT_LOG'
LOG_FORMAT = '[%(levelname)s] %(message)s'
FILE_LOG_FORMAT = '%(asctime)s [%(levelname)s] %(name)s: %(message)s'

_VALID_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')


def resolve_level(level: Optional[str] = None, config_level: Optional[str] = None) -> int:
    """解析日志级别

    Args:
        level: 显式指定的级别名
        config_level: 配置文件中的级别名

    Returns:
        logging 模块的级别常量
    """
    for candidate in (level, os.environ.get(LOG_ENV_VAR), config_level):
        if candidate and candidate.upper() in _VALID_LEVELS:
            return getattr(logging, candidate.upper())
    return logging.WARNING


def setup_logging(level: Optional[str] = None,
                  log_dir: Optional[Path] = None,
                  config_level: Optional[str] = None) -> Optional[Path]:
    """配置根 logger

    Args:
        level: 显式级别
        log_dir: 日志目录，None 表示只输出到 stderr
        config_level: 配置中的级别

    Returns:
        日志文件路径（未写文件时为 None）
    """
    root = logging.getLogger()
    root.setLevel(resolve_level(level, config_level))

    # 重复调用时替换掉自己装的 handler
    for handler in list(root.handlers):
        if getattr(handler, '_causal_ot', False):
            root.removeHandler(handler)

    console = logging.StreamHandler()
    console.setFormatter(logging.Formatter(LOG_FORMAT))
    setattr(console, '_causal_ot', True)
    root.addHandler(console)

    if log_dir is None:
        return None

    try:
        log_dir.mkdir(parents=True, exist_ok=True)
        today = datetime.datetime.now().strftime('%Y%m%d')
        log_path = log_dir / f'causal_ot_{today}.txt'
        file_handler = logging.FileHandler(log_path, encoding='utf-8')
        file_handler.setFormatter(logging.Formatter(FILE_LOG_FORMAT))
        setattr(file_handler, '_causal_ot', True)
        root.addHandler(file_handler)
        return log_path
    except OSError as e:
        logging.getLogger(__name__).warning(f"日志文件初始化失败: {e}")
        return None
