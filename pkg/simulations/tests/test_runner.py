import json
import tempfile
from dataclasses import replace
from io import StringIO
from pathlib import Path
from unittest import mock

import numpy as np
import pandas as pd
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, tag

from circuits.qops import basis_index

from simulations.catalog import catalog
from simulations.dynamics import NoiseRates
from simulations.exceptions import ConfigurationError, IntegrationError
from simulations.measures import swap_permutation
from simulations.runner import (
    csv_header,
    load_config_file,
    parse_summary,
    preset,
    resolve_scenario,
    run,
    rwa_deviation,
    rwa_validation,
    to_frame,
)


class OutputDirMixin:

    def setUp(self):
        super().setUp()
        self._tmp = tempfile.TemporaryDirectory()
        self.out = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()
        super().tearDown()


def small(name, **overrides):
    overrides.setdefault('points', 201)
    return preset(name).with_overrides(**overrides)


class RunTests(OutputDirMixin, SimpleTestCase):

    def test_ideal_swap_summary(self):
        result = run(small('fig2a', points=1001), self.out)
        summary = result.summary
        self.assertEqual(summary.scenario, 'fig2a')
        self.assertIsNone(summary.seed)
        self.assertEqual(summary.realizations, 1)
        self.assertEqual(summary.gate.target_state, '10')
        self.assertAlmostEqual(summary.gate.gate_time, np.pi / 2, delta=1e-3)
        self.assertEqual([r.measure_kind for r in summary.entanglement], ['concurrence'])
        self.assertLessEqual(summary.diagnostics['excitation_drift'], 1e-10)
        self.assertLess(summary.diagnostics['trace_drift'], 1e-8)
        self.assertEqual(set(summary.outputs), {'csv', 'json'})
        self.assertEqual(summary.truth_table.permutation(), swap_permutation())
        self.assertAlmostEqual(summary.truth_table.t_g, summary.gate.gate_time)
        self.assertEqual(summary.truth_table.agreement(swap_permutation()), 1.0)

    def test_ensemble_runs_have_no_truth_table(self):
        self.assertIsNone(run(small('fig2b', realizations=4, points=51)).summary.truth_table)
        self.assertIsNone(run(small('fig2d', realizations=4, points=51)).summary.truth_table)

    def test_truth_table_survives_json_round_trip(self):
        result = run(small('fig4a'), self.out, formats='json')
        payload = json.loads((self.out / 'fig4a.json').read_text())
        self.assertEqual(set(payload['truth_table']['rows']), {f'{k:03b}' for k in range(8)})
        self.assertEqual(parse_summary(json.dumps(payload)), result.summary)

    def test_csv_layout(self):
        result = run(small('fig2b', realizations=10, points=51), self.out, formats='csv')
        path = Path(result.summary.outputs['csv'])
        first_line = path.read_text().splitlines()[0]
        self.assertEqual(first_line, csv_header(result))
        self.assertIn('rho_2=|10>', first_line)
        frame = pd.read_csv(path, comment='#')
        self.assertEqual(
            list(frame.columns),
            ['t', 'rho_0', 'rho_1', 'rho_2', 'rho_3', 'concurrence',
             'stderr_0', 'stderr_1', 'stderr_2', 'stderr_3'],
        )
        self.assertEqual(len(frame), 51)
        np.testing.assert_allclose(frame['rho_2'], result.populations()[:, basis_index('10')], rtol=0, atol=1e-15)
        self.assertNotIn('json', result.summary.outputs)

    def test_deterministic_run_has_no_stderr_columns(self):
        frame = to_frame(run(small('fig4a')))
        self.assertEqual(list(frame.columns), ['t'] + [f'rho_{k}' for k in range(8)] + ['w_fidelity'])

    def test_three_qubit_reports(self):
        result = run(small('fig4a'))
        kinds = [r.measure_kind for r in result.summary.entanglement]
        self.assertEqual(kinds, ['w_fidelity', 'population_balance'])
        self.assertEqual(result.summary.gate.target_state, '110')
        self.assertEqual(result.summary.outputs, {})

    def test_same_seed_same_files(self):
        first_dir, second_dir = self.out / 'a', self.out / 'b'
        first = run(small('fig2b', realizations=15, points=51), first_dir)
        second = run(small('fig2b', realizations=15, points=51), second_dir)
        self.assertEqual((first_dir / 'fig2b.csv').read_bytes(), (second_dir / 'fig2b.csv').read_bytes())
        left = json.loads((first_dir / 'fig2b.json').read_text())
        right = json.loads((second_dir / 'fig2b.json').read_text())
        for payload in (left, right):
            payload.pop('runtime')
            payload.pop('outputs')
        self.assertEqual(left, right)
        self.assertEqual(first.summary.seed, 20240601)

    def test_summary_json_round_trip(self):
        result = run(small('fig2d', realizations=10, points=51), self.out, formats='json')
        raw = (self.out / 'fig2d.json').read_bytes()
        self.assertTrue(raw.endswith(b'\n'))
        self.assertEqual(parse_summary(raw), result.summary)

    def test_plot_is_written(self):
        result = run(small('fig2a', points=101), self.out, formats='csv', plot=True)
        svg = Path(result.summary.outputs['svg'])
        self.assertTrue(svg.read_text().lstrip().startswith('<?xml'))

    def test_plot_is_reproducible(self):
        run(small('fig2a', points=101), self.out / 'a', formats='csv', plot=True)
        run(small('fig2a', points=101), self.out / 'b', formats='csv', plot=True)
        self.assertEqual((self.out / 'a' / 'fig2a.svg').read_bytes(), (self.out / 'b' / 'fig2a.svg').read_bytes())

    def test_invalid_format(self):
        with self.assertRaises(ConfigurationError):
            run(small('fig2a'), self.out, formats='xml')


class ConfigFileTests(OutputDirMixin, SimpleTestCase):

    def write(self, text):
        path = self.out / 'scenario.json'
        path.write_text(text)
        return path

    def test_valid_file(self):
        path = self.write(json.dumps({'base': 'fig2a', 'name': 'slow-swap', 'couplings': [{'g_m': 0.5}]}))
        spec = load_config_file(path)
        self.assertEqual(spec.name, 'slow-swap')
        self.assertEqual(spec.couplings[0].g_m, 0.5)

    def test_malformed_json(self):
        with self.assertRaises(ConfigurationError) as ctx:
            load_config_file(self.write('{"name": "x",\n  "qubits": }'))
        self.assertIn('scenario.json', str(ctx.exception))

    def test_missing_file(self):
        with self.assertRaises(ConfigurationError):
            load_config_file(self.out / 'absent.json')

    def test_name_or_config_required(self):
        with self.assertRaises(ConfigurationError):
            resolve_scenario()

    def test_positional_name_is_the_base_of_a_partial_file(self):
        path = self.write(json.dumps({'name': 'fig2d-short', 'integrator': {'t_max': 2.0}}))
        spec = resolve_scenario('fig2d', path)
        self.assertEqual(spec.name, 'fig2d-short')
        self.assertEqual(spec.integrator.t_max, 2.0)
        self.assertEqual(spec.noise_policy, preset('fig2d').noise_policy)
        self.assertEqual(spec.random_spec(), preset('fig2d').random_spec())

    def test_base_in_the_file_wins_over_positional_name(self):
        path = self.write(json.dumps({'base': 'fig2a', 'name': 'from-file'}))
        spec = resolve_scenario('fig2d', path)
        self.assertFalse(spec.is_random)
        self.assertTrue(spec.is_noiseless)


class CommandTests(OutputDirMixin, SimpleTestCase):

    def call(self, *args):
        stdout = StringIO()
        call_command('simulate', *args, stdout=stdout)
        return stdout.getvalue()

    def test_list(self):
        output = self.call('--list')
        for name in ('fig2a', 'fig2g', 'fig4f'):
            self.assertIn(name, output)

    def test_run_preset(self):
        output = self.call('fig2a', '--out', str(self.out), '--format', 'csv')
        self.assertIn('fig2a', output)
        self.assertIn('t_g=1.57', output)
        self.assertTrue((self.out / 'fig2a.csv').exists())
        self.assertFalse((self.out / 'fig2a.json').exists())

    def test_run_ensemble_with_overrides(self):
        self.call('fig2c', '--realizations', '8', '--points', '41', '--t-max', '2', '--seed', '9',
                  '--out', str(self.out), '--format', 'json')
        payload = json.loads((self.out / 'fig2c.json').read_text())
        self.assertEqual(payload['seed'], 9)
        self.assertEqual(payload['realizations'], 8)
        self.assertEqual(len(payload['final_populations']), 4)

    def test_config_file(self):
        path = self.out / 'input.json'
        path.write_text(json.dumps({
            'name': 'custom', 'qubits': 2, 'frequencies': [1, 1],
            'couplings': [{'kind': 'constant', 'g_m': 2.0}], 'initial': '01',
        }))
        self.call('--config', str(path), '--out', str(self.out))
        payload = json.loads((self.out / 'custom.json').read_text())
        t_g = payload['gate']['gate_time']
        self.assertAlmostEqual(t_g, np.pi / 4, delta=1e-3)
        self.assertAlmostEqual(payload['gate']['peak_probability'], 1.0, delta=1e-5)

    def test_config_file_with_positional_base(self):
        path = self.out / 'partial.json'
        path.write_text(json.dumps({
            'name': 'fig2d-short',
            'integrator': {'t_max': 2.0, 'grid_points': 21},
            'ensemble': {'realizations': 4},
        }))
        output = self.call('fig2d', '--config', str(path), '--out', str(self.out), '--format', 'json')
        self.assertIn('fig2d-short', output)
        payload = json.loads((self.out / 'fig2d-short.json').read_text())
        self.assertEqual(payload['realizations'], 4)
        self.assertEqual(len(payload['final_populations']), 4)
        self.assertIsNone(payload['truth_table'])

    def test_run_prints_truth_table_agreement(self):
        output = self.call('fig2a', '--out', str(self.out), '--format', 'csv')
        self.assertIn('100% of inputs follow the ideal gate', output)

    def test_unknown_scenario_exits_with_config_status(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('fig9z', '--out', str(self.out))
        self.assertEqual(ctx.exception.returncode, 2)

    def test_invalid_config_exits_with_config_status(self):
        path = self.out / 'bad.json'
        path.write_text(json.dumps({'name': 'bad', 'qubits': 5}))
        with self.assertRaises(CommandError) as ctx:
            self.call('--config', str(path), '--out', str(self.out))
        self.assertEqual(ctx.exception.returncode, 2)

    def test_bad_override_exits_with_config_status(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('fig2b', '--realizations', '0', '--out', str(self.out))
        self.assertEqual(ctx.exception.returncode, 2)

    def test_bad_threshold_exits_with_config_status(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('fig2a', '--threshold', '1.5', '--out', str(self.out))
        self.assertEqual(ctx.exception.returncode, 2)

    def test_numerical_failure_exits_with_numerical_status(self):
        failure = IntegrationError('Required step size is less than spacing between numbers.', 3.2)
        with mock.patch('simulations.management.commands.simulate.run', side_effect=failure):
            with self.assertRaises(CommandError) as ctx:
                self.call('fig2a', '--out', str(self.out))
        self.assertEqual(ctx.exception.returncode, 3)
        self.assertIn('t=3.2', str(ctx.exception))


class CatalogPhysicalityTests(SimpleTestCase):

    def test_every_preset_stays_physical(self):
        for name in catalog():
            with self.subTest(preset=name):
                diagnostics = run(small(name, realizations=4)).summary.diagnostics
                self.assertLessEqual(diagnostics['trace_drift'], 1e-8)
                self.assertLessEqual(diagnostics['hermiticity'], 1e-10)
                self.assertGreaterEqual(diagnostics['min_eigenvalue'], -1e-9)
                if 'excitation_drift' in diagnostics:
                    self.assertLessEqual(diagnostics['excitation_drift'], 1e-10)


class RwaValidationTests(SimpleTestCase):

    def test_deviation_shrinks_with_frequency_scale(self):
        deviations = rwa_validation((20.0, 100.0))
        self.assertLessEqual(deviations[100.0], 0.5 * deviations[20.0])
        self.assertGreater(deviations[20.0], 0.0)

    def test_rejects_degenerate_split(self):
        with self.assertRaises(ValueError):
            rwa_deviation(10.0, split=(0.5, 0.5))
        with self.assertRaises(ValueError):
            rwa_deviation(0.0)


@tag('slow')
class FullPresetTests(OutputDirMixin, SimpleTestCase):

    def test_random_coupling_preset_at_full_size(self):
        result = run(preset('fig2b'), self.out)
        final = result.populations()[-1, basis_index('10')]
        self.assertAlmostEqual(final, 0.477, delta=0.04)
        self.assertEqual(result.summary.realizations, 1500)

    def test_joint_random_three_qubit_preset(self):
        result = run(preset('fig4b'), self.out, plot=True)
        self.assertEqual(set(result.summary.outputs), {'csv', 'json', 'svg'})
        traces = np.real(np.trace(result.source.mean_states, axis1=1, axis2=2))
        np.testing.assert_allclose(traces, 1.0, atol=1e-8)

    def test_noisy_single_trajectory_config(self):
        spec = replace(preset('fig2a'), name='fig2a-noisy', noise=NoiseRates(0.1, 0.1, 0.1))
        result = run(spec)
        self.assertNotIn('excitation_drift', result.summary.diagnostics)
