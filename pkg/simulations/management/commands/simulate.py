from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from simulations.catalog import catalog
from simulations.dynamics import METHODS
from simulations.exceptions import ConfigurationError, NumericalError
from simulations.measures import ideal_permutation
from simulations.runner import FORMATS, resolve_scenario, run, rwa_validation

CONFIG_ERROR = 2
NUMERICAL_ERROR = 3


class Command(BaseCommand):
    help = 'Run a transmon scenario (preset name or --config FILE) and write CSV / JSON / SVG outputs'

    def add_arguments(self, parser):
        parser.add_argument('scenario', nargs='?', help='Preset name (see --list); base of --config if both are given')
        parser.add_argument('--config', help='JSON scenario file')
        parser.add_argument('--seed', type=int, help='Master seed of the disorder ensemble')
        parser.add_argument('--realizations', type=int, help='Ensemble size')
        parser.add_argument('--t-max', type=float, dest='t_max', help='End of the time grid')
        parser.add_argument('--points', type=int, help='Number of grid points')
        parser.add_argument('--out', help='Output directory (default settings.SIMULATION["OUTPUT_DIR"])')
        parser.add_argument('--format', choices=FORMATS, default='both', dest='formats')
        parser.add_argument('--plot', action='store_true', help='Also write an SVG plot')
        parser.add_argument('--jobs', type=int, help='Parallel workers for ensembles (-1 = all cores)')
        parser.add_argument('--method', choices=METHODS, help='Integrator')
        parser.add_argument('--threshold', type=float, help='Entanglement event threshold (fraction of max)')
        parser.add_argument('--list', action='store_true', help='List presets and exit')
        parser.add_argument('--rwa-check', action='store_true', help='Compare the rotating frame against RWA')

    def handle(self, *args, **options):
        if options['list']:
            return self._list()
        try:
            if options['rwa_check']:
                return self._rwa_check()
            self._run(options)
        except ConfigurationError as exc:
            raise CommandError(str(exc), returncode=CONFIG_ERROR)
        except NumericalError as exc:
            raise CommandError(str(exc), returncode=NUMERICAL_ERROR)

    def _list(self):
        for name, spec in catalog().items():
            kind = f"ensemble N={spec.ensemble.realizations}" if spec.is_random else 'single trajectory'
            self.stdout.write(f"{name:<8} {spec.qubits}q  {kind:<22} {spec.description}")

    def _rwa_check(self):
        deviations = rwa_validation()
        for scale, deviation in deviations.items():
            self.stdout.write(f"scale={scale:g}  max |dP| = {deviation:.3e}")
        low, high = min(deviations), max(deviations)
        if deviations[high] <= 0.5 * deviations[low]:
            self.stdout.write(self.style.SUCCESS('RWA deviation shrinks with the frequency scale'))
        else:
            self.stdout.write(self.style.WARNING('RWA deviation did not shrink as expected'))

    def _run(self, options):
        spec = resolve_scenario(options['scenario'], options['config'])
        spec = spec.with_overrides(
            seed=options['seed'],
            realizations=options['realizations'],
            t_max=options['t_max'],
            points=options['points'],
            n_jobs=options['jobs'],
            method=options['method'],
        )
        threshold = options['threshold']
        if threshold is not None and not 0 < threshold <= 1:
            raise ConfigurationError(f"threshold must be in (0, 1], got {threshold}")
        out_dir = Path(options['out']) if options['out'] else Path(settings.SIMULATION['OUTPUT_DIR'])

        result = run(spec, out_dir, formats=options['formats'], plot=options['plot'], threshold=threshold)
        summary = result.summary

        gate = summary.gate
        self.stdout.write(self.style.SUCCESS(f"{summary.scenario}: done in {summary.runtime:.2f}s"))
        self.stdout.write(f"  gate   |{gate.target_state}>  t_g={gate.gate_time:.4f}  p={gate.peak_probability:.4f}")
        if summary.truth_table is not None:
            agreement = summary.truth_table.agreement(ideal_permutation(summary.qubits))
            self.stdout.write(f"  table  {agreement:.0%} of inputs follow the ideal gate at t_g")
        for report in summary.entanglement:
            times = ', '.join(f"{t:.3f}" for t in report.times[:6])
            more = ' ...' if len(report.times) > 6 else ''
            self.stdout.write(f"  {report.measure_kind:<18} {len(report.times)} event(s): {times}{more}")
        for kind, path in summary.outputs.items():
            self.stdout.write(f"  {kind:<4} {path}")
