# -*- coding: utf-8 -*-
"""
causal-ot - Lorentz 时空上的离散最优输运

目录结构:
- src/
  - main.py: 程序主入口（依赖检查 + 命令行分发）
  - config.py: 配置管理
  - core/: 错误类型、日志、i18n、±∞ 编解码
  - geometry/: 时空模型、emerald、随机采样
  - measures/: 离散测度、测度路径与曲线提升
  - transport/: 效用函数、可行性、精确求解、对偶核验、可解析实例
  - hopflax/: Hopf–Lax 半群与 HJ 不等式
  - dynamics/: 位移插值、CCI、Benamou–Brenier 核验
  - formats/: 问题文件解析、报告/CSV 输出
  - workers/: 批量实例线程池
  - ui/: 子命令与表格输出
"""

__version__ = "1.0.0"
