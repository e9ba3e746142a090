# -*- coding: utf-8 -*-
"""批量实例 Worker 模块

在线程池中并行运行互相独立的求解/核验实例：
- 结果按提交顺序返回
- 单个实例异常只记录日志并以失败结果返回，不影响其它实例
- 支持超时与中途停止
"""

import logging
import threading
import time
from concurrent.futures import Future, ThreadPoolExecutor, TimeoutError as FuturesTimeoutError
from dataclasses import dataclass
from typing import Any, Callable, Dict, Generic, List, Optional, Sequence, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar('T')


@dataclass
class BatchResult(Generic[T]):
    """单个实例的结果

    Attributes:
        index: 提交顺序
        value: 成功时的返回值
        error: 失败时的异常描述
        elapsed: 耗时（秒）
    """
    index: int
    value: Optional[T] = None
    error: Optional[str] = None
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return self.error is None


class BatchWorker:
    """批量实例执行器

    Args:
        jobs: 并发线程数（1 时在当前线程顺序执行）
        timeout: 单个实例的超时（秒），None 表示不限
        on_progress: 进度回调 (完成数, 总数)
    """

    def __init__(self, jobs: int = 1, timeout: Optional[float] = None,
                 on_progress: Optional[Callable[[int, int], None]] = None):
        self.jobs = max(1, int(jobs))
        self.timeout = timeout
        self.on_progress = on_progress
        self._running = False
        self._lock = threading.Lock()
        self._executor: Optional[ThreadPoolExecutor] = None
        self.stats: Dict[str, int] = {'done': 0, 'failed': 0, 'timeout': 0}

    def _reset_stats(self) -> None:
        with self._lock:
            self.stats = {'done': 0, 'failed': 0, 'timeout': 0}

    def _record(self, key: str) -> None:
        with self._lock:
            self.stats[key] += 1

    def _call(self, index: int, func: Callable[..., T], args: Sequence[Any]) -> BatchResult[T]:
        start = time.perf_counter()
        try:
            value = func(*args)
            self._record('done')
            return BatchResult(index, value=value, elapsed=time.perf_counter() - start)
        except Exception as e:
            self._record('failed')
            logger.warning(f"实例 #{index} 失败: {type(e).__name__}: {str(e)[:200]}")
            return BatchResult(index, error=f"{type(e).__name__}: {e}", elapsed=time.perf_counter() - start)

    def _progress(self, done: int, total: int) -> None:
        if self.on_progress:
            try:
                self.on_progress(done, total)
            except Exception:
                # 回调异常不影响批量任务
                pass

    def run(self, func: Callable[..., T], tasks: Sequence[Sequence[Any]]) -> List[BatchResult[T]]:
        """对每组参数调用 func，返回按提交顺序排列的结果

        Args:
            func: 实例函数，须无共享可变状态
            tasks: 每个实例的位置参数
        """
        self._reset_stats()
        self._running = True
        total = len(tasks)
        logger.debug(f"批量任务开始: {total} 个实例, {self.jobs} 线程")
        results: List[BatchResult[T]] = []
        try:
            if self.jobs == 1:
                for i, args in enumerate(tasks):
                    if not self._running:
                        results.append(BatchResult(i, error='stopped'))
                        continue
                    results.append(self._call(i, func, args))
                    self._progress(i + 1, total)
                return results

            self._executor = ThreadPoolExecutor(max_workers=self.jobs, thread_name_prefix="Solve")
            futures: List[Future] = [self._executor.submit(self._call, i, func, args)
                                     for i, args in enumerate(tasks)]
            for i, future in enumerate(futures):
                try:
                    results.append(future.result(timeout=self.timeout))
                except FuturesTimeoutError:
                    future.cancel()
                    self._record('timeout')
                    logger.warning(f"实例 #{i} 超时（{self.timeout}s）")
                    results.append(BatchResult(i, error='timeout'))
                self._progress(i + 1, total)
            return results
        finally:
            self.stop(wait=True)
            logger.debug(f"批量任务结束: {self.stats}")

    def stop(self, wait: bool = False) -> None:
        """停止批量任务

        Args:
            wait: 是否等待正在执行的实例完成
        """
        self._running = False
        executor, self._executor = self._executor, None
        if executor is not None:
            try:
                executor.shutdown(wait=wait, cancel_futures=not wait)
            except Exception as e:
                logger.warning(f"线程池关闭异常: {e}")
