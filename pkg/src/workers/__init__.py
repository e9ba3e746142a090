# -*- coding: utf-8 -*-
"""
Workers 模块 - 后台执行

包含：
- batch_worker.py: 批量实例线程池执行器（BatchWorker）
"""

from .batch_worker import BatchResult, BatchWorker

__all__ = ['BatchResult', 'BatchWorker']
