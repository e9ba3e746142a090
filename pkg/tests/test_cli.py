# -*- coding: utf-8 -*-
"""
命令行测试：退出码、JSON 报告、--out-dir 输出
"""

import io
import json
import math
import sys
import tempfile
import unittest
from contextlib import redirect_stdout
from pathlib import Path

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).parent.parent))

import src
from src.config import ConfigManager
from src.core.i18n import set_language, t
from src.core.utils import get_app_version
from src.formats.problem import dump_problem, parse_problem, problem_to_spec
from src.formats.report import loads_report, read_csv
from src.geometry.spacetime import FiniteCausal
from src.measures.discrete import DiscreteMeasure
from src.ui.commands import (
    EXIT_INFEASIBLE, EXIT_OK, EXIT_PARSE, EXIT_VIOLATION, build_parser, execute, run, run_batch,
)

S2 = {
    "spacetime": {"type": "minkowski", "dim": 1},
    "p": 0.5,
    "mu0": {"atoms": [{"x": [0, -1], "w": 0.5}, {"x": [0, 1], "w": 0.5}]},
    "mu1": {"atoms": [{"x": [2, -1], "w": 0.5}, {"x": [2, 1], "w": 0.5}]},
    "grid": {"n": 5},
}

D1 = {
    "spacetime": {"type": "minkowski", "dim": 1},
    "p": 0.5,
    "mu0": {"atoms": [{"x": [0, 0], "w": 1}]},
    "mu1": {"atoms": [{"x": [3, 1], "w": 1}]},
    "grid": {"n": 5},
}

PAST_TARGET = {
    "spacetime": {"type": "minkowski", "dim": 1},
    "p": 0.5,
    "mu0": {"atoms": [{"x": [0, 0], "w": 1}]},
    "mu1": {"atoms": [{"x": [-1, 0], "w": 1}]},
}

CHAIN_FIELD = {
    "spacetime": {"type": "minkowski", "dim": 1},
    "p": 0.5,
    "field": {"points": [[0, 0], [1, 0], [2, 0]], "f": [0, 1, 2], "L": 1, "t_grid": [0.25, 0.5, 1]},
}

DIRAC_PATH = {
    "spacetime": {"type": "minkowski", "dim": 1},
    "p": 0.5,
    "path": {
        "times": [0, 0.5, 1],
        "measures": [
            {"atoms": [{"x": [0, 0], "w": 1}]},
            {"atoms": [{"x": [1, 0], "w": 1}]},
            {"atoms": [{"x": [2, 0], "w": 1}]},
        ],
    },
}


class CLITestCase(unittest.TestCase):
    """临时目录中写问题文件与配置，捕获输出流"""

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.root = Path(self._tmp.name)
        self.config_path = self.root / 'config.json'

    def tearDown(self):
        self._tmp.cleanup()

    def write(self, name, spec):
        path = self.root / name
        if isinstance(spec, str):
            path.write_text(spec, encoding='utf-8')
        else:
            path.write_text(json.dumps(spec, indent=2), encoding='utf-8')
        return path

    def invoke(self, *argv):
        out, err = io.StringIO(), io.StringIO()
        code = run([*map(str, argv), '--config', str(self.config_path)], out=out, err=err)
        return code, out.getvalue(), err.getvalue()


class TestSolveCommand(CLITestCase):
    """solve / dual / feasible"""

    def test_solve_json(self):
        code, out, _ = self.invoke('solve', self.write('s2.json', S2), '--json')
        self.assertEqual(code, EXIT_OK)
        report = loads_report(out)
        self.assertEqual(report['command'], 'solve')
        self.assertAlmostEqual(report['value'], 2 * math.sqrt(2), places=7)
        self.assertAlmostEqual(report['ell_p'], 2.0, places=7)
        self.assertTrue(report['feasible'])

    def test_solve_table(self):
        code, out, _ = self.invoke('solve', self.write('s2.json', S2))
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(out.strip())

    def test_config_written(self):
        self.invoke('solve', self.write('s2.json', S2), '--json')
        self.assertTrue(self.config_path.exists())
        self.assertEqual(ConfigManager(self.config_path).load()['grid'], 17)

    def test_out_dir(self):
        out_dir = self.root / 'out'
        code, _, _ = self.invoke('solve', self.write('s2.json', S2), '--json', '--out-dir', out_dir)
        self.assertEqual(code, EXIT_OK)
        report = loads_report((out_dir / 'solve.json').read_text(encoding='utf-8'))
        self.assertAlmostEqual(report['value'], 2 * math.sqrt(2), places=7)
        rows = read_csv(out_dir / 'solve_plan.csv')
        self.assertEqual(len(rows), 2)
        self.assertAlmostEqual(float(rows[0]['j0']), 0.5)

    def test_solve_infeasible(self):
        code, out, _ = self.invoke('solve', self.write('past.json', PAST_TARGET), '--json')
        self.assertEqual(code, EXIT_INFEASIBLE)
        report = loads_report(out)
        self.assertEqual(report['value'], -math.inf)
        self.assertEqual(report['cut'], [0])

    def test_feasible_cut(self):
        code, out, _ = self.invoke('feasible', self.write('past.json', PAST_TARGET), '--json')
        self.assertEqual(code, EXIT_INFEASIBLE)
        report = loads_report(out)
        self.assertFalse(report['feasible'])
        self.assertEqual(report['cut'], [0])

    def test_feasible_witness(self):
        code, out, _ = self.invoke('feasible', self.write('s2.json', S2), '--json', '--strict')
        self.assertEqual(code, EXIT_OK)
        report = loads_report(out)
        self.assertTrue(report['strict'])
        self.assertEqual(len(report['witness']), 2)

    def test_dual(self):
        code, out, _ = self.invoke('dual', self.write('d1.json', D1), '--json')
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(loads_report(out)['feasible'])


class TestDynamicCommands(CLITestCase):
    """interpolate / speed / bb / hopflax"""

    def test_interpolate(self):
        code, out, _ = self.invoke('interpolate', self.write('s2.json', S2), '--json')
        self.assertEqual(code, EXIT_OK)
        report = loads_report(out)
        self.assertTrue(report['speed_constant'])
        self.assertTrue(report['support_contained'])
        self.assertEqual(len(report['path']['times']), 5)

    def test_grid_override(self):
        code, out, _ = self.invoke('interpolate', self.write('s2.json', {k: v for k, v in S2.items() if k != 'grid'}),
                                   '--json', '--grid', 3)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(loads_report(out)['path']['times'], [0.0, 0.5, 1.0])

    def test_speed(self):
        code, out, _ = self.invoke('speed', self.write('path.json', DIRAC_PATH), '--json')
        self.assertEqual(code, EXIT_OK)
        report = loads_report(out)
        for s in report['speeds']:
            self.assertAlmostEqual(s, 2.0, places=9)
        self.assertAlmostEqual(report['path_action'], 2 * math.sqrt(2), places=9)

    def test_bb(self):
        code, out, _ = self.invoke('bb', self.write('d1.json', D1), '--json')
        self.assertEqual(code, EXIT_OK)
        report = loads_report(out)
        self.assertTrue(report['ok'])

    def test_hopflax_no_hj(self):
        code, out, _ = self.invoke('hopflax', self.write('chain.json', CHAIN_FIELD), '--json', '--no-hj')
        self.assertEqual(code, EXIT_OK)
        report = loads_report(out)
        self.assertTrue(report['maximizer_bound'])
        self.assertNotIn('hj_ok', report)

    def test_hopflax_with_hj(self):
        out_dir = self.root / 'hl'
        code, out, _ = self.invoke('hopflax', self.write('chain.json', CHAIN_FIELD), '--json', '--out-dir', out_dir)
        self.assertEqual(code, EXIT_OK)
        self.assertIn('hj_ok', loads_report(out))
        self.assertTrue((out_dir / 'hopflax_hopflax.csv').exists())

    def test_hopflax_constant_field(self):
        spec = json.loads(json.dumps(CHAIN_FIELD))
        spec['field']['f'] = [1, 1, 1]
        code, out, _ = self.invoke('hopflax', self.write('flat.json', spec), '--json')
        self.assertEqual(code, EXIT_VIOLATION)
        self.assertEqual(loads_report(out)['violation'], 'steepness')


class TestErrors(CLITestCase):
    """问题文件错误与领域异常"""

    def test_syntax_error_line(self):
        text = '{\n  "spacetime": {"type": "minkowski", "dim": 1},\n  "p": 0.5,,\n}'
        code, out, err = self.invoke('solve', self.write('bad.json', text))
        self.assertEqual(code, EXIT_PARSE)
        self.assertEqual(out, '')
        self.assertIn('3', err)

    def test_missing_section(self):
        code, _, err = self.invoke('solve', self.write('field.json', CHAIN_FIELD))
        self.assertEqual(code, EXIT_PARSE)
        self.assertIn('mu0', err)

    def test_missing_file(self):
        code, _, _ = self.invoke('solve', self.root / 'nope.json')
        self.assertEqual(code, EXIT_PARSE)

    def test_domain_error_becomes_report(self):
        """有限因果空间上请求 Benamou–Brenier 核验"""
        F = FiniteCausal([[0, 1], [-math.inf, 0]], labels=['a', 'b'])
        problem = parse_problem(dump_problem(problem_to_spec(F, 0.5, DiscreteMeasure.dirac('a'),
                                                             DiscreteMeasure.dirac('b'))))
        config = ConfigManager(self.config_path)
        config.load()
        outcome = execute('bb', problem, config, build_parser().parse_args(['bb', 'x.json']))
        self.assertEqual(outcome.code, EXIT_VIOLATION)
        self.assertFalse(outcome.report['ok'])
        self.assertEqual(outcome.report['error'], 'CapabilityMissing')


class TestBatchMode(CLITestCase):
    """多个问题文件：经 BatchWorker 并发运行，报告按文件顺序"""

    def test_two_instances_parallel(self):
        files = [self.write('s2.json', S2), self.write('d1.json', D1)]
        code, out, _ = self.invoke('solve', *files, '--json', '--jobs', 2)
        self.assertEqual(code, EXIT_OK)
        report = loads_report(out)
        self.assertEqual(report['command'], 'solve')
        self.assertEqual(report['codes'], [EXIT_OK, EXIT_OK])
        self.assertTrue(report['ok'])
        first, second = report['instances']
        self.assertEqual(first['file'], str(files[0]))
        self.assertAlmostEqual(first['value'], 2 * math.sqrt(2), places=7)
        self.assertAlmostEqual(second['ell_p'], 2 * math.sqrt(2), places=7)

    def test_matches_single_runs(self):
        files = [self.write(f'd1_{k}.json', D1) for k in range(3)] + [self.write('s2.json', S2)]
        code, out, _ = self.invoke('bb', *files, '--json', '--jobs', 2)
        self.assertEqual(code, EXIT_OK)
        batch = loads_report(out)['instances']
        for path, row in zip(files, batch):
            _, single, _ = self.invoke('bb', path, '--json')
            self.assertEqual(row['dynamic_action'], loads_report(single)['dynamic_action'])

    def test_exit_code_is_worst_instance(self):
        files = [
            self.write('s2.json', S2),
            self.write('past.json', PAST_TARGET),
            self.write('bad.json', '{\n  "p": 0.5,,\n}'),
        ]
        code, out, err = self.invoke('solve', *files, '--json', '--jobs', 2)
        self.assertEqual(code, EXIT_INFEASIBLE)
        report = loads_report(out)
        self.assertEqual(report['codes'], [EXIT_OK, EXIT_INFEASIBLE, EXIT_PARSE])
        self.assertFalse(report['ok'])
        self.assertEqual(report['instances'][2]['error'], 'ProblemFileError')
        self.assertIn('bad.json', err)

    def test_out_dir_per_instance(self):
        out_dir = self.root / 'batch'
        files = [self.write('s2.json', S2), self.write('d1.json', D1)]
        code, out, _ = self.invoke('solve', *files, '--out-dir', out_dir, '--jobs', 2)
        self.assertEqual(code, EXIT_OK)
        self.assertIn('[', out)
        self.assertTrue((out_dir / 'solve_batch.json').exists())
        rows = read_csv(out_dir / '000_s2' / 'solve_plan.csv')
        self.assertEqual(len(rows), 2)
        single = loads_report((out_dir / '001_d1' / 'solve.json').read_text(encoding='utf-8'))
        self.assertAlmostEqual(single['ell_p'], 2 * math.sqrt(2), places=7)

    def test_tolerances_stay_per_instance(self):
        """一个实例的 tolerances 段只作用于该实例，调用方的配置不变"""
        loose = dict(D1, tolerances={'duality': 0.5})
        files = [self.root / 'missing.json', self.write('loose.json', loose), self.write('d1.json', D1)]
        config = ConfigManager(self.config_path)
        config.load()
        args = build_parser().parse_args(['dual', *map(str, files), '--jobs', '2'])
        outcomes = run_batch('dual', files, config, args)
        self.assertEqual([o.code for o in outcomes], [EXIT_PARSE, EXIT_OK, EXIT_OK])
        self.assertEqual(config.tolerance('duality'), ConfigManager.DEFAULT_CONFIG['tolerances']['duality'])


class TestLanguage(CLITestCase):
    """报告语言与版本信息"""

    def tearDown(self):
        set_language('zh_CN')
        super().tearDown()

    def test_english_table(self):
        code, out, _ = self.invoke('solve', self.write('s2.json', S2), '--lang', 'en_US')
        self.assertEqual(code, EXIT_OK)
        self.assertIn('Static optimal transport', out)
        self.assertIn('Optimal value', out)

    def test_unknown_language_keeps_current(self):
        set_language('en_US')
        self.assertFalse(set_language('fr_FR'))
        self.assertEqual(t('title_solve'), 'Static optimal transport')
        self.assertEqual(t('no_such_key', 'fallback'), 'fallback')

    def test_version(self):
        out = io.StringIO()
        with self.assertRaises(SystemExit), redirect_stdout(out):
            build_parser().parse_args(['--version'])
        self.assertIn(f'causal-ot v{src.__version__}', out.getvalue())
        self.assertEqual(get_app_version(), src.__version__)


if __name__ == '__main__':
    unittest.main(verbosity=2)
