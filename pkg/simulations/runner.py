"""
Scenario Runner

Resolves a scenario (catalog preset or JSON config), runs it, extracts the
gate and entanglement reports, and writes CSV / JSON / SVG outputs.
"""

import logging
import time
from dataclasses import dataclass, field, replace
from io import BytesIO
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from rest_framework.exceptions import ParseError
from rest_framework.parsers import JSONParser

from circuits.hamiltonians import (
    ConstantCoupling,
    ParametricCoupling,
    TwoQubitParams,
    build_rwa_two,
    rotating_frame_callback,
)
from circuits.qops import basis_label, basis_state, excitation_operator

from .catalog import get_scenario
from .disorder import EnsembleConfig, EnsembleResult, run_ensemble
from .dynamics import IntegratorConfig, LindbladSystem, Trajectory, check_trajectory, integrate
from .exceptions import ConfigurationError
from .measures import (
    EntanglementReport,
    GateReport,
    TruthTable,
    default_measure,
    find_entanglement_events,
    find_gate_event,
    ideal_permutation,
    measure_series,
    truth_table,
)
from .plotting import plot_populations
from .renderers import SummaryJSONRenderer
from .scenarios import ScenarioSpec
from .serializers import RunSummarySerializer, ScenarioSpecSerializer

logger = logging.getLogger(__name__)

FORMATS = ('csv', 'json', 'both')


@dataclass
class RunSummary:
    scenario: str
    qubits: int
    seed: Optional[int]
    realizations: int
    gate: GateReport
    entanglement: List[EntanglementReport]
    final_populations: List[float]
    runtime: float
    diagnostics: Dict[str, float]
    outputs: Dict[str, str] = field(default_factory=dict)
    truth_table: Optional[TruthTable] = None


@dataclass(eq=False)
class RunResult:
    spec: ScenarioSpec
    summary: RunSummary
    source: Union[Trajectory, EnsembleResult]
    measures: Dict[str, np.ndarray]

    @property
    def grid(self) -> np.ndarray:
        return self.source.grid

    def populations(self) -> np.ndarray:
        return self.source.populations()

    @property
    def stderr(self) -> Optional[np.ndarray]:
        return self.source.population_stderr if isinstance(self.source, EnsembleResult) else None


# ========== SCENARIO RESOLUTION ==========

def preset(name: str) -> ScenarioSpec:
    """Catalog preset with integrator and ensemble defaults taken from settings"""
    spec = get_scenario(name)
    ensemble = EnsembleConfig.from_settings(realizations=spec.ensemble.realizations)
    return replace(spec, integrator=IntegratorConfig.from_settings(), ensemble=ensemble)


def _deep_merge(base: dict, override: dict) -> dict:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _format_errors(errors, prefix='') -> List[str]:
    lines = []
    if isinstance(errors, dict):
        for key, value in errors.items():
            lines.extend(_format_errors(value, f"{prefix}{key}." if key != 'non_field_errors' else prefix))
    elif isinstance(errors, list):
        for i, value in enumerate(errors):
            if isinstance(value, (dict, list)):
                lines.extend(_format_errors(value, f"{prefix}{i}."))
            else:
                lines.append(f"{prefix.rstrip('.') or 'config'}: {value}")
    else:
        lines.append(f"{prefix.rstrip('.') or 'config'}: {errors}")
    return lines


def load_scenario(data: dict) -> ScenarioSpec:
    """
    Validate a scenario configuration dict, merging it over `base` when given.

    Raises:
        ConfigurationError: with one "field: message" line per problem
    """
    if not isinstance(data, dict):
        raise ConfigurationError("scenario config must be a JSON object")
    base = data.get('base')
    if base:
        data = _deep_merge(dict(ScenarioSpecSerializer(preset(base)).data), data)
    serializer = ScenarioSpecSerializer(data=data)
    if not serializer.is_valid():
        lines = _format_errors(serializer.errors)
        raise ConfigurationError('invalid scenario config:\n  ' + '\n  '.join(lines), serializer.errors)
    return serializer.save()


def load_config_file(path: Union[str, Path], base: Optional[str] = None) -> ScenarioSpec:
    """Parse a JSON scenario file; `base` fills in for a file without its own"""
    path = Path(path)
    try:
        with path.open('rb') as stream:
            data = JSONParser().parse(stream)
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}") from None
    except ParseError as exc:
        raise ConfigurationError(f"{path}: {exc.detail}") from None
    if base and isinstance(data, dict):
        if data.get('base') and data['base'] != base:
            logger.info("Config %s names base %r; positional %r ignored", path, data['base'], base)
        else:
            data = {**data, 'base': base}
    return load_scenario(data)


def resolve_scenario(name: Optional[str] = None, config_path: Optional[Union[str, Path]] = None) -> ScenarioSpec:
    """Config file if given (a positional name then acts as its base), else the preset"""
    if config_path is not None:
        return load_config_file(config_path, base=name)
    if not name:
        raise ConfigurationError("give a scenario name or --config FILE")
    return preset(name)


# ========== RUNNING ==========

def simulate(spec: ScenarioSpec) -> Union[Trajectory, EnsembleResult]:
    """Single trajectory for deterministic scenarios, ensemble mean otherwise"""
    if spec.is_random:
        return run_ensemble(spec, spec.random_spec(), spec.ensemble)
    return integrate(spec.system_for({}), spec.initial_state(), spec.integrator)


def _diagnostics(spec: ScenarioSpec, source) -> Dict[str, float]:
    trajectory = source.as_trajectory() if isinstance(source, EnsembleResult) else source
    report = check_trajectory(trajectory, np.inf, np.inf, np.inf)
    if spec.is_noiseless and not spec.is_random:
        n_op = excitation_operator(spec.qubits)
        numbers = np.real(np.einsum('ij,tji->t', n_op, trajectory.states))
        report['excitation_drift'] = float(np.max(np.abs(numbers - numbers[0])))
    report['nfev'] = float(trajectory.nfev)
    return report


def run(
    spec: ScenarioSpec,
    out_dir: Optional[Union[str, Path]] = None,
    formats: str = 'both',
    plot: bool = False,
    threshold: Optional[float] = None,
) -> RunResult:
    """
    Run one scenario and write its outputs.

    Args:
        spec: resolved scenario
        out_dir: output directory; None writes nothing
        formats: 'csv', 'json' or 'both'
        plot: also write an SVG plot
        threshold: entanglement event threshold (fraction of the global max);
            settings.SIMULATION['ENTANGLEMENT_THRESHOLD'] if None

    Returns:
        RunResult with the summary and the computed series
    """
    if formats not in FORMATS:
        raise ConfigurationError(f"format must be one of {FORMATS}, got {formats!r}")
    if threshold is None:
        from django.conf import settings
        threshold = settings.SIMULATION['ENTANGLEMENT_THRESHOLD']

    random = spec.is_random
    logger.info(
        "Run start: %s (qubits=%d, hamiltonian=%s, realizations=%s, seed=%s)",
        spec.name, spec.qubits, spec.hamiltonian,
        spec.ensemble.realizations if random else 1, spec.ensemble.master_seed if random else None,
    )
    started = time.perf_counter()
    source = simulate(spec)

    target = ideal_permutation(spec.qubits)[spec.initial]
    gate = find_gate_event(source, target)
    kinds = ['concurrence'] if spec.qubits == 2 else ['w_fidelity', 'population_balance']
    measures = {kind: measure_series(source, kind) for kind in kinds}
    events = [find_entanglement_events(source, kind, threshold, series=measures[kind]) for kind in kinds]
    table = None
    if spec.is_noiseless and not random and gate.gate_time > 0:
        table = truth_table(spec, gate.gate_time)

    summary = RunSummary(
        scenario=spec.name,
        qubits=spec.qubits,
        seed=spec.ensemble.master_seed if random else None,
        realizations=spec.ensemble.realizations if random else 1,
        gate=gate,
        entanglement=events,
        final_populations=[float(p) for p in source.populations()[-1]],
        runtime=0.0,
        diagnostics=_diagnostics(spec, source),
        truth_table=table,
    )
    result = RunResult(spec=spec, summary=summary, source=source, measures=measures)
    summary.runtime = time.perf_counter() - started

    if out_dir is not None:
        write_outputs(result, Path(out_dir), formats, plot)
    logger.info(
        "Run done: %s in %.2fs, gate %s at t=%.4f (p=%.4f)",
        spec.name, summary.runtime, gate.target_state, gate.gate_time, gate.peak_probability,
    )
    return result


# ========== OUTPUTS ==========

def csv_header(result: RunResult) -> str:
    spec = result.spec
    n = spec.qubits
    labels = ", ".join(f"rho_{k}=|{basis_label(k, n)}>" for k in range(2 ** n))
    seed = result.summary.seed if result.summary.seed is not None else 'none'
    return (
        f"# scenario={spec.name} qubits={n} seed={seed} realizations={result.summary.realizations}; "
        f"populations by basis state, qubit 1 most significant: {labels}"
    )


def to_frame(result: RunResult) -> pd.DataFrame:
    n_states = 2 ** result.spec.qubits
    populations = result.populations()
    columns = {'t': result.grid}
    for k in range(n_states):
        columns[f'rho_{k}'] = populations[:, k]
    kind = default_measure(result.spec.qubits)
    columns[kind] = result.measures[kind]
    if result.stderr is not None:
        for k in range(n_states):
            columns[f'stderr_{k}'] = result.stderr[:, k]
    return pd.DataFrame(columns)


def write_csv(result: RunResult, path: Path) -> Path:
    with path.open('w', newline='') as handle:
        handle.write(csv_header(result) + '\n')
        to_frame(result).to_csv(handle, index=False, float_format='%.17g', lineterminator='\n')
    return path


def write_outputs(result: RunResult, out_dir: Path, formats: str = 'both', plot: bool = False) -> Dict[str, str]:
    out_dir.mkdir(parents=True, exist_ok=True)
    name = result.spec.name
    outputs = result.summary.outputs
    if formats in ('csv', 'both'):
        outputs['csv'] = str(write_csv(result, out_dir / f'{name}.csv'))
    if plot:
        kind = default_measure(result.spec.qubits)
        outputs['svg'] = str(plot_populations(
            out_dir / f'{name}.svg',
            result.grid,
            result.populations(),
            title=f'{name}: {result.spec.description}' if result.spec.description else name,
            measure=result.measures[kind],
            measure_label=kind,
            stderr=result.stderr,
        ))
    if formats in ('json', 'both'):
        path = out_dir / f'{name}.json'
        outputs['json'] = str(path)
        path.write_bytes(SummaryJSONRenderer().render(RunSummarySerializer(result.summary).data))
    for kind, path in outputs.items():
        logger.info("Wrote %s: %s", kind, path)
    return outputs


def parse_summary(payload: Union[bytes, str, dict]) -> RunSummary:
    """Inverse of the summary JSON writer"""
    if not isinstance(payload, dict):
        raw = payload.encode('utf-8') if isinstance(payload, str) else payload
        payload = JSONParser().parse(BytesIO(raw))
    serializer = RunSummarySerializer(data=payload)
    serializer.is_valid(raise_exception=True)
    return serializer.save()


# ========== RWA VALIDATION ==========

def rwa_deviation(
    scale: float,
    g_m: float = 1.0,
    split: Tuple[float, float] = (0.6, 0.4),
    config: Optional[IntegratorConfig] = None,
    initial: str = '01',
) -> float:
    """
    Max population deviation between the rotating-frame interaction and its
    resonant flip-flop approximation.

    The qubits sit at split * scale with parametric coupling g(t) = g_m cos(w_m t),
    w_m = |w1 - w2|. The reference is the flip-flop Hamiltonian with the
    resonant amplitude g_m / 2 of the cosine.
    """
    if scale <= 0:
        raise ValueError(f"scale must be > 0, got {scale}")
    omega1, omega2 = split[0] * scale, split[1] * scale
    detuning = abs(omega1 - omega2)
    if detuning == 0:
        raise ValueError("split must detune the qubits")
    config = config or IntegratorConfig(t_max=5.0, grid_points=501)
    rho0 = basis_state(initial)

    exact = TwoQubitParams(omega1, omega2, ParametricCoupling(0.0, g_m, detuning))
    rotating = integrate(LindbladSystem(rotating_frame_callback(exact)), rho0, config)

    mean = 0.5 * (omega1 + omega2)
    resonant = TwoQubitParams(mean, mean, ConstantCoupling(0.5 * g_m))
    reference = integrate(LindbladSystem(build_rwa_two(resonant, 0.5 * g_m)), rho0, config)

    deviation = float(np.max(np.abs(rotating.populations() - reference.populations())))
    logger.info("RWA check at scale %.4g: max deviation %.3e (nfev=%d)", scale, deviation, rotating.nfev)
    return deviation


def rwa_validation(scales: Iterable[float] = (20.0, 100.0), **kwargs) -> Dict[float, float]:
    return {float(scale): rwa_deviation(scale, **kwargs) for scale in scales}
