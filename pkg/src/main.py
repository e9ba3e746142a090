# -*- coding: utf-8 -*-
"""
causal-ot - 主程序入口

先检查数值依赖，再交给 src.ui.commands 分发子命令。
"""
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

# 添加项目根目录到 Python 路径
project_root = Path(__file__).parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))


def check_dependencies() -> Tuple[bool, List[str], List[str]]:
    """检查关键依赖是否已安装

    Returns:
        (all_ok, missing_required, missing_optional)
        - all_ok: 必需依赖是否全部满足
        - missing_required: 缺失的必需依赖列表
        - missing_optional: 缺失的可选依赖列表
    """
    missing_required: List[str] = []
    missing_optional: List[str] = []

    required_packages = [
        ('numpy', 'pip install numpy'),
        ('scipy', 'pip install scipy'),        # linprog (HiGHS)
        ('networkx', 'pip install networkx'),  # 最大流
    ]
    # 只有测试用到
    optional_packages = [
        ('hypothesis', 'pip install hypothesis'),
        ('psutil', 'pip install psutil'),
    ]

    for pkg_name, install_cmd in required_packages:
        try:
            __import__(pkg_name)
        except ImportError:
            missing_required.append(f'{pkg_name}: {install_cmd}')

    for pkg_name, install_cmd in optional_packages:
        try:
            __import__(pkg_name)
        except ImportError:
            missing_optional.append(f'{pkg_name}: {install_cmd}')

    return len(missing_required) == 0, missing_required, missing_optional


def show_dependency_warning(missing_required: List[str], missing_optional: List[str]) -> None:
    """显示依赖缺失警告（写到 stderr，不污染报告输出）"""
    if missing_required:
        print("\n" + "=" * 60, file=sys.stderr)
        print("❌ 缺少必需依赖，程序无法启动：", file=sys.stderr)
        for dep in missing_required:
            print(f"   - {dep}", file=sys.stderr)
        print("=" * 60 + "\n", file=sys.stderr)

    if missing_optional:
        print("-" * 60, file=sys.stderr)
        print("ℹ️ 缺少可选依赖，测试工具不可用：", file=sys.stderr)
        for dep in missing_optional:
            print(f"   - {dep}", file=sys.stderr)
        print("-" * 60, file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """主程序入口"""
    all_ok, missing_required, _ = check_dependencies()
    if not all_ok:
        show_dependency_warning(missing_required, [])
        return 1

    # 延迟导入，缺依赖时先给出提示
    from src.ui.commands import run

    return run(argv)


if __name__ == '__main__':
    sys.exit(main())
