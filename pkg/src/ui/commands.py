# -*- coding: utf-8 -*-
"""
命令行子命令

    causal-ot <solve|dual|feasible|interpolate|speed|bb|hopflax|cci-check> FILE [FILE ...] [选项]

退出码：0 成功/核验通过；1 问题文件错误；2 不可行；3 性质违例。
报告默认以表格打印，--json 时打印 JSON；--out-dir 给定时另写 JSON 报告与 CSV 序列。
多个问题文件时经 BatchWorker 批量运行，退出码取各实例的最大值。
"""
import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, TextIO

import numpy as np

from src.config import ConfigManager
from src.core.errors import CausalOTError, DualityGap, ProblemFileError, PropertyViolation
from src.core.i18n import set_language, t
from src.core.log import setup_logging
from src.core.utils import get_app_dir, get_app_title
from src.formats.problem import ProblemFile, load_problem
from src.formats.report import dumps_report, matrix_rows, write_csv, write_report
from src.ui.render import render_report
from src.workers.batch_worker import BatchWorker

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_INFEASIBLE = 2
EXIT_VIOLATION = 3

COMMANDS = ('solve', 'dual', 'feasible', 'interpolate', 'speed', 'bb', 'hopflax', 'cci-check')


@dataclass
class CommandOutcome:
    """子命令结果：退出码、报告、CSV 序列（文件名 → 行）"""
    code: int
    report: Dict[str, Any]
    series: Dict[str, List[Dict[str, Any]]] = field(default_factory=dict)


class CommandContext:
    """子命令运行时上下文：生效配置、随机源、参数"""

    def __init__(self, config: ConfigManager, args: argparse.Namespace):
        self.config = config
        self.args = args
        self.seed = int(config.get('seed', 0))
        self.jobs = int(config.get('jobs', 1))
        self.grid = int(config.get('grid', 17))

    def tol(self, name: str) -> float:
        return self.config.tolerance(name)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def battery(self, M):
        from src.dynamics.cci import Ramp, standard_battery

        opts = self.config.get('cci_battery', {})
        lo, hi = opts.get('ramp_breakpoints', [0.0, 2.0])
        ramp = Ramp(float(lo), float(hi), float(opts.get('ramp_height', 1.0)))
        return standard_battery(M, self.rng(), int(opts.get('random_covectors', 10)), ramp)


def _coords(x: Any) -> Any:
    return list(x.coords) if hasattr(x, 'coords') else x


def _require_static(problem: ProblemFile) -> None:
    problem.require('mu0', 'mu1', 'exponent')


# ========== 子命令实现 ==========

def cmd_solve(problem: ProblemFile, ctx: CommandContext) -> CommandOutcome:
    from src.transport.solver import solve_primal

    _require_static(problem)
    result = solve_primal(problem.model, problem.mu0, problem.mu1, problem.exponent)
    report = result.to_report()
    report.update({'feasible': result.feasible, 'ok': result.feasible})
    if not result.feasible:
        return CommandOutcome(EXIT_INFEASIBLE, report)
    return CommandOutcome(EXIT_OK, report, {'plan': matrix_rows(report['plan'])})


def cmd_dual(problem: ProblemFile, ctx: CommandContext) -> CommandOutcome:
    from src.transport.duality import verify_duality
    from src.transport.solver import solve_primal

    _require_static(problem)
    result = solve_primal(problem.model, problem.mu0, problem.mu1, problem.exponent)
    if not result.feasible:
        report = {'p': problem.exponent.p, 'feasible': False, 'ok': False, 'primal': result.value}
        return CommandOutcome(EXIT_INFEASIBLE, report)
    eps = [float(v) for v in ctx.config.get('steepening_eps', [0.1, 0.01, 0.001])]
    try:
        rep = verify_duality(problem.model, problem.mu0, problem.mu1, problem.exponent, result,
                             tol=ctx.tol('duality'), epsilons=eps)
        report, code = rep.to_report(), EXIT_OK
    except DualityGap as err:
        report, code = dict(err.details), EXIT_VIOLATION
        report['ok'] = False
    report.update({'p': problem.exponent.p, 'feasible': True})
    return CommandOutcome(code, report, {'steepening': list(report.get('steepening', []))})


def cmd_feasible(problem: ProblemFile, ctx: CommandContext) -> CommandOutcome:
    from src.transport.feasibility import Infeasible, feasible

    problem.require('mu0', 'mu1')
    strict = bool(getattr(ctx.args, 'strict', False))
    verdict = feasible(problem.model, problem.mu0, problem.mu1, strict=strict)
    report: Dict[str, Any] = {'feasible': verdict.is_feasible, 'strict': strict, 'flow_value': verdict.flow_value}
    if isinstance(verdict, Infeasible):
        report.update({
            'ok': False,
            'cut': verdict.cut,
            'cut_locations': [_coords(x) for x in verdict.cut_locations],
            'cut_mass': [verdict.cut_mass, verdict.neighbor_mass],
        })
        return CommandOutcome(EXIT_INFEASIBLE, report)
    report.update({'ok': True, 'witness': verdict.witness.matrix.tolist()})
    return CommandOutcome(EXIT_OK, report, {'witness': matrix_rows(report['witness'])})


def cmd_interpolate(problem: ProblemFile, ctx: CommandContext) -> CommandOutcome:
    from src.dynamics.interpolation import geodesic_path, merge_counts, support_contained
    from src.measures.paths import speed_profile
    from src.transport.solver import solve_primal

    _require_static(problem)
    M, e = problem.model, problem.exponent
    result = solve_primal(M, problem.mu0, problem.mu1, e)
    if not result.feasible:
        report = {'p': e.p, 'feasible': False, 'ok': False, 'ell_p': result.ell_p}
        return CommandOutcome(EXIT_INFEASIBLE, report)
    grid = problem.grid or ctx.grid
    path, lifted = geodesic_path(M, problem.mu0, problem.mu1, result.plan, grid)
    speeds = speed_profile(M, path, e)
    contained = support_contained(M, problem.mu0, problem.mu1, path)
    scale = max(1.0, abs(result.ell_p))
    constant = all(abs(s - result.ell_p) <= 1e-9 * scale for s in speeds)
    report = {
        'p': e.p,
        'feasible': True,
        'ell_p': result.ell_p,
        'curves': len(lifted),
        'merge_count': sum(merge_counts(lifted)),
        'speeds': speeds,
        'speed_constant': constant,
        'support_contained': contained,
        'path': path.to_spec(),
        'lifted': lifted.to_spec(),
        'ok': contained and constant,
    }
    rows = [{'t0': a, 't1': b, 'speed': s} for a, b, s in zip(path.times[:-1], path.times[1:], speeds)]
    return CommandOutcome(EXIT_OK if report['ok'] else EXIT_VIOLATION, report, {'speeds': rows})


def _path_of(problem: ProblemFile):
    if problem.path is not None:
        return problem.path
    if problem.lifted is not None:
        return problem.lifted.to_path()
    raise ProblemFileError("问题文件需要 path 或 lifted 段")


def cmd_speed(problem: ProblemFile, ctx: CommandContext) -> CommandOutcome:
    from src.measures.paths import path_action, speed_profile

    problem.require('exponent')
    P, e = _path_of(problem), problem.exponent
    speeds = speed_profile(problem.model, P, e)
    report = {
        'p': e.p,
        'times': P.times.tolist(),
        'speeds': speeds,
        'path_action': path_action(problem.model, P, e, speeds=speeds),
        'ok': True,
    }
    rows = [{'t0': a, 't1': b, 'speed': s} for a, b, s in zip(P.times[:-1], P.times[1:], speeds)]
    return CommandOutcome(EXIT_OK, report, {'speeds': rows})


def cmd_bb(problem: ProblemFile, ctx: CommandContext) -> CommandOutcome:
    from src.dynamics.benamou_brenier import verify_benamou_brenier

    _require_static(problem)
    rep = verify_benamou_brenier(problem.model, problem.mu0, problem.mu1, problem.exponent,
                                 problem.grid or ctx.grid, tests=ctx.battery(problem.model),
                                 tol=ctx.tol('bb_gap'), cci_tol=ctx.tol('cci'), jobs=ctx.jobs)
    report = rep.to_report()
    report['min_residual'] = rep.cci.min_residual if rep.cci else None
    series = {'bb_series': rep.series_rows()} if rep.feasible else {}
    return CommandOutcome(EXIT_OK if rep.ok else EXIT_VIOLATION, report, series)


def cmd_hopflax(problem: ProblemFile, ctx: CommandContext) -> CommandOutcome:
    from src.hopflax.semigroup import (
        HopfLaxField, check_hj_inequality, check_maximizer_bound, check_semigroup_properties,
    )

    problem.require('field', 'exponent')
    sec, e = problem.field, problem.exponent
    opts = ctx.config.get('hopflax', {})
    t_grid = sec.t_grid or opts.get('t_grid', [0.125, 0.25, 0.5, 1.0])
    try:
        hl = HopfLaxField.build(problem.model, sec.points, sec.f, sec.L, e, t_grid, sec.interior,
                                steep_tol=ctx.tol('steepness'), tie_tol=ctx.tol('tie'))
        semigroup = check_semigroup_properties(hl, tol=ctx.tol('steepness'))
    except PropertyViolation as err:
        report = {'p': e.p, 'L': sec.L, 'ok': False, 'violation': err.which, 'where': str(err.where)}
        return CommandOutcome(EXIT_VIOLATION, report)

    bound_failures = [(float(tk), int(j)) for tk in hl.t_grid for j in hl.interior
                      if not check_maximizer_bound(hl, float(tk), hl.points[j])]
    report: Dict[str, Any] = {
        'p': e.p,
        'L': hl.L,
        'steepness': semigroup.steepness,
        'monotone': semigroup.monotone,
        'young_bound_ok': semigroup.young_bound_ok,
        'lipschitz': semigroup.lipschitz_constant,
        'maximizer_bound': not bound_failures,
        'maximizer_failures': bound_failures,
        'semigroup': semigroup.to_report(),
        'ok': not bound_failures,
    }
    if not getattr(ctx.args, 'no_hj', False):
        hj = check_hj_inequality(hl, h=float(opts.get('hj_step', 1e-4)),
                                 radii=opts.get('radii', [1.0, 0.5, 0.25, 0.125]),
                                 strict=bool(opts.get('strict_radii', False)))
        report.update({'hj_min_slack': hj.min_slack, 'hj_ok': hj.ok, 'hj': hj.to_report()})
    rows = [{'t': float(tk), 'y': j, 'Q': float(hl.values[k, j]), 'argmax': int(hl.argmax[k, j]),
             'lmax': float(hl.lmax[k, j])}
            for k, tk in enumerate(hl.t_grid) for j in hl.interior]
    return CommandOutcome(EXIT_OK if report['ok'] else EXIT_VIOLATION, report, {'hopflax': rows})


def cmd_cci_check(problem: ProblemFile, ctx: CommandContext) -> CommandOutcome:
    from src.dynamics.benamou_brenier import check_kuwada_direction
    from src.dynamics.cci import check_cci
    from src.dynamics.interpolation import barycentric_velocity

    M = problem.model
    P = _path_of(problem)
    lifted = None
    if problem.velocities is not None:
        V = problem.velocity_series()
    elif problem.lifted is not None:
        lifted = problem.lifted
        V = barycentric_velocity(M, lifted)
    else:
        raise ProblemFileError("cci-check 需要 velocities 或 lifted 段")
    battery = ctx.battery(M)
    cci = check_cci(M, P, V, battery, tol=ctx.tol('cci'))
    report: Dict[str, Any] = {
        'tests': len(battery),
        'min_residual': cci.min_residual,
        'cci': cci.to_report(),
        'ok': cci.ok,
    }
    if cci.ok and problem.exponent is not None:
        kw = check_kuwada_direction(M, P, V, problem.exponent, tests=battery, lifted=lifted,
                                    tol=ctx.tol('kuwada'), cci_tol=ctx.tol('cci'))
        report.update({
            'p': problem.exponent.p,
            'path_action': kw.path_action,
            'dynamic_action': kw.dynamic_action,
            'kuwada': kw.to_report(),
            'ok': kw.ok,
        })
    rows = []
    for k in range(len(P) - 1):
        row: Dict[str, Any] = {'t0': float(P.times[k]), 't1': float(P.times[k + 1])}
        for res in cci.results:
            row[res.name] = res.residuals[k]
        rows.append(row)
    return CommandOutcome(EXIT_OK if report['ok'] else EXIT_VIOLATION, report, {'cci_residuals': rows})


HANDLERS: Dict[str, Callable[[ProblemFile, CommandContext], CommandOutcome]] = {
    'solve': cmd_solve,
    'dual': cmd_dual,
    'feasible': cmd_feasible,
    'interpolate': cmd_interpolate,
    'speed': cmd_speed,
    'bb': cmd_bb,
    'hopflax': cmd_hopflax,
    'cci-check': cmd_cci_check,
}


# ========== 参数与分发 ==========

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('file', nargs='+', type=Path, help='问题文件（JSON）；多个文件时批量运行')
    common.add_argument('--json', action='store_true', help='以 JSON 输出报告')
    common.add_argument('--out-dir', type=Path, default=None, help='写出 JSON 报告与 CSV 序列的目录')
    common.add_argument('--tol', type=float, default=None, help='统一覆盖 duality/bb_gap/kuwada/cci 容差')
    common.add_argument('--grid', type=int, default=None, help='时间网格点数')
    common.add_argument('--seed', type=int, default=None, help='随机种子（试验函数组等）')
    common.add_argument('--jobs', type=int, default=None, help='并发线程数（批量实例之间；单实例时用于 bb 的 CCI 检查）')
    common.add_argument('--config', type=Path, default=None, help='配置文件路径')
    common.add_argument('--lang', default=None, choices=['zh_CN', 'en_US'], help='报告语言')
    common.add_argument('--log-level', default=None, help='日志级别（覆盖 CAUSAL_OT_LOG）')

    parser = argparse.ArgumentParser(prog='causal-ot', description=get_app_title())
    parser.add_argument('--version', action='version', version=get_app_title())
    sub = parser.add_subparsers(dest='command', required=True)
    sub.add_parser('solve', parents=[common], help='静态最优输运')
    sub.add_parser('dual', parents=[common], help='Kantorovich 对偶核验')
    feas = sub.add_parser('feasible', parents=[common], help='因果耦合可行性')
    feas.add_argument('--strict', action='store_true', help='只允许类时配对')
    sub.add_parser('interpolate', parents=[common], help='测地位移插值')
    sub.add_parser('speed', parents=[common], help='测度路径的因果速度与作用量')
    sub.add_parser('bb', parents=[common], help='Benamou–Brenier 核验')
    hl = sub.add_parser('hopflax', parents=[common], help='Hopf–Lax 半群性质')
    hl.add_argument('--no-hj', action='store_true', help='跳过 HJ 不等式诊断')
    sub.add_parser('cci-check', parents=[common], help='CCI 与 Kuwada 方向检查')
    return parser


def _load_config(args: argparse.Namespace) -> ConfigManager:
    config = ConfigManager(args.config or get_app_dir() / 'config.json')
    config.load()
    return config


def execute(command: str, problem: ProblemFile, config: ConfigManager,
            args: Optional[argparse.Namespace] = None) -> CommandOutcome:
    """对已解析的问题运行子命令；领域异常转为退出码 3 的报告"""
    ctx = CommandContext(config, args or argparse.Namespace())
    try:
        return HANDLERS[command](problem, ctx)
    except ProblemFileError:
        raise
    except CausalOTError as err:
        logger.warning(f"{t('err_violation')}: {type(err).__name__}: {err}")
        return CommandOutcome(EXIT_VIOLATION, {'ok': False, 'error': type(err).__name__, 'message': str(err)})


def _prepare(path: Path, config: ConfigManager, args: argparse.Namespace) -> ProblemFile:
    """读取问题文件；问题文件的 tolerances 段先生效，命令行参数再覆盖"""
    problem = load_problem(path)
    config.apply_overrides(tolerances=problem.tolerances)
    config.apply_overrides(tol=args.tol, grid=args.grid, seed=args.seed)
    return problem


def run_file(command: str, path: Path, config: ConfigManager, args: argparse.Namespace) -> CommandOutcome:
    """批量中的单个实例：独立的配置副本，问题文件错误转为退出码 1 的报告

    实例内部不再开线程（jobs 固定为 1），并发只发生在实例之间。
    """
    local = config.copy()
    local.set('jobs', 1)
    try:
        problem = _prepare(path, local, args)
    except ProblemFileError as e:
        return CommandOutcome(EXIT_PARSE, {'ok': False, 'error': 'ProblemFileError', 'message': str(e)})
    return execute(command, problem, local, args)


def run_batch(command: str, paths: Sequence[Path], config: ConfigManager,
              args: argparse.Namespace) -> List[CommandOutcome]:
    """多个问题文件作为独立实例交给 BatchWorker，结果按文件顺序返回"""
    jobs = int(config.get('jobs', 1))
    worker = BatchWorker(jobs=jobs, on_progress=lambda done, total: logger.info(f"批量进度 {done}/{total}"))
    results = worker.run(lambda path: run_file(command, path, config, args), [(p,) for p in paths])
    outcomes: List[CommandOutcome] = []
    for path, res in zip(paths, results):
        if res.ok and res.value is not None:
            outcomes.append(res.value)
        else:
            logger.warning(f"实例 {path} 未完成: {res.error}")
            outcomes.append(CommandOutcome(EXIT_VIOLATION, {'ok': False, 'error': 'BatchError',
                                                            'message': str(res.error)}))
    return outcomes


def _write_outputs(out_dir: Path, stem: str, report: Dict[str, Any],
                   series: Dict[str, List[Dict[str, Any]]]) -> List[Path]:
    written = [write_report(out_dir / f"{stem}.json", report)]
    for name, rows in series.items():
        if rows:
            written.append(write_csv(out_dir / f"{stem}_{name}.csv", rows))
    return written


def _emit(command: str, outcome: CommandOutcome, args: argparse.Namespace, out: TextIO) -> None:
    report = {'command': command, **outcome.report}
    if args.json:
        out.write(dumps_report(report) + '\n')
    else:
        out.write(render_report(command, report) + '\n')
    if args.out_dir is None:
        return
    written = _write_outputs(args.out_dir, command.replace('-', '_'), report, outcome.series)
    if not args.json:
        for path in written[1:]:
            out.write(f"{t('csv_written')}: {path}\n")


def _emit_batch(command: str, paths: Sequence[Path], outcomes: Sequence[CommandOutcome],
                args: argparse.Namespace, out: TextIO, err: TextIO) -> int:
    """批量报告：instances 按文件顺序排列；--out-dir 下每个实例一个子目录"""
    stem = command.replace('-', '_')
    codes = [o.code for o in outcomes]
    instances = [{'file': str(path), 'code': o.code, **o.report} for path, o in zip(paths, outcomes)]
    batch = {'command': command, 'codes': codes, 'instances': instances, 'ok': not any(codes)}
    for path, o in zip(paths, outcomes):
        if o.code == EXIT_PARSE:
            err.write(f"{t('err_problem_file')}: {path}: {o.report.get('message')}\n")

    if args.json:
        out.write(dumps_report(batch) + '\n')
    else:
        for k, (path, o) in enumerate(zip(paths, outcomes)):
            out.write(f"[{t('batch_instance')} {k}] {path}\n")
            out.write(render_report(command, {'command': command, **o.report}) + '\n\n')
        out.write(f"{t('batch_summary')}: {codes}\n")
    if args.out_dir is not None:
        write_report(args.out_dir / f"{stem}_batch.json", batch)
        for k, (path, o) in enumerate(zip(paths, outcomes)):
            _write_outputs(args.out_dir / f"{k:03d}_{Path(path).stem}", stem,
                           {'command': command, **o.report}, o.series)
    return max(codes) if codes else EXIT_OK


def run(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None,
        err: Optional[TextIO] = None) -> int:
    """命令行入口

    给出多个问题文件时进入批量模式，各文件作为独立实例按 --jobs 并发运行，
    退出码取各实例退出码的最大值。

    Args:
        argv: 参数列表，默认取 sys.argv[1:]
        out: 报告输出流
        err: 错误输出流

    Returns:
        退出码
    """
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    config = _load_config(args)
    log_dir = get_app_dir() / 'logs' if config.get('log_to_file') else None
    setup_logging(args.log_level, log_dir, config.get('log_level'))
    config.apply_overrides(language=args.lang, jobs=args.jobs)
    set_language(config.get('language'))

    if len(args.file) > 1:
        outcomes = run_batch(args.command, args.file, config, args)
        code = _emit_batch(args.command, args.file, outcomes, args, out, err)
        logger.info(f"{args.command} 批量结束，{len(outcomes)} 个实例，退出码 {code}")
        return code

    try:
        problem = _prepare(args.file[0], config, args)
        outcome = execute(args.command, problem, config, args)
    except ProblemFileError as e:
        err.write(f"{t('err_problem_file')}: {e}\n")
        return EXIT_PARSE
    _emit(args.command, outcome, args, out)
    logger.info(f"{args.command} 结束，退出码 {outcome.code}")
    return outcome.code
