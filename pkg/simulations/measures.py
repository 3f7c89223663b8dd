"""
Observables and reports on trajectories and ensemble means
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from circuits.qops import (
    W_COMPONENTS,
    DensityMatrix,
    PauliKind,
    basis_index,
    basis_label,
    basis_state,
    excitation_operator,
    pauli,
    qubit_count,
    w_state,
)

from .disorder import EnsembleResult
from .dynamics import Trajectory, integrate
from .exceptions import ConfigurationError

logger = logging.getLogger(__name__)

MEASURE_KINDS = ('concurrence', 'w_fidelity', 'population_balance', 'purity', 'excitation_number')

# Refined peaks this close to the highest one are the same event repeating
PEAK_TIE_TOL = 1e-6

Source = Union[Trajectory, EnsembleResult]

_SIGMA_YY = np.kron(pauli(PauliKind.Y), pauli(PauliKind.Y))
_W_PROJECTOR = w_state()


@dataclass(frozen=True)
class GateReport:
    target_state: str
    gate_time: float
    peak_probability: float


@dataclass(frozen=True)
class EntanglementReport:
    measure_kind: str
    times: List[float] = field(default_factory=list)
    values: List[float] = field(default_factory=list)


@dataclass(frozen=True)
class TruthRow:
    output: str
    probability: float


@dataclass(frozen=True)
class TruthTable:
    t_g: float
    rows: Dict[str, TruthRow]

    def permutation(self) -> Dict[str, str]:
        return {label: row.output for label, row in self.rows.items()}

    def agreement(self, ideal: Dict[str, str]) -> float:
        """Fraction of inputs whose most likely output matches the ideal table"""
        if set(ideal) != set(self.rows):
            raise ValueError("ideal table covers different inputs")
        hits = sum(1 for label, row in self.rows.items() if ideal[label] == row.output)
        return hits / len(self.rows)


# ========== STATE MEASURES ==========

def populations(rho: DensityMatrix) -> np.ndarray:
    """Real diagonal (works on a single state or a stack)"""
    return np.real(np.diagonal(np.asarray(rho), axis1=-2, axis2=-1)).copy()


def w_fidelity(rho: DensityMatrix) -> float:
    """<W| rho |W>"""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (8, 8):
        raise ValueError(f"W fidelity needs a three-qubit state, got shape {rho.shape}")
    return float(np.real(np.trace(_W_PROJECTOR @ rho)))


def concurrence(rho: DensityMatrix) -> float:
    """
    Wootters concurrence max(0, l1 - l2 - l3 - l4), with l_i the descending
    square roots of the eigenvalues of rho (Y x Y) rho* (Y x Y).
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"concurrence needs a two-qubit state, got shape {rho.shape}")
    r = rho @ _SIGMA_YY @ np.conj(rho) @ _SIGMA_YY
    eigenvalues = np.sort(np.sqrt(np.clip(np.real(np.linalg.eigvals(r)), 0.0, None)))[::-1]
    return float(max(0.0, eigenvalues[0] - np.sum(eigenvalues[1:])))


def purity(rho: DensityMatrix) -> float:
    rho = np.asarray(rho, dtype=complex)
    return float(np.real(np.trace(rho @ rho)))


def excitation_number(rho: DensityMatrix) -> float:
    """trace(rho N) with N = sum_j (s_j^z + I) / 2"""
    rho = np.asarray(rho, dtype=complex)
    n_op = excitation_operator(qubit_count(rho.shape[0]))
    return float(np.real(np.trace(rho @ n_op)))


def population_balance(rho: DensityMatrix) -> float:
    """min/max of the single-flip sector populations (|01>,|10>) or the W components"""
    rho = np.asarray(rho, dtype=complex)
    n = qubit_count(rho.shape[0])
    if n not in (2, 3):
        raise ValueError(f"population balance is defined for 2 or 3 qubits, got {n}")
    labels = ('01', '10') if n == 2 else W_COMPONENTS
    sector = np.array([np.real(rho[basis_index(label), basis_index(label)]) for label in labels])
    top = sector.max()
    return float(sector.min() / top) if top > 0 else 0.0


_MEASURES = {
    'concurrence': concurrence,
    'w_fidelity': w_fidelity,
    'population_balance': population_balance,
    'purity': purity,
    'excitation_number': excitation_number,
}


def default_measure(n_qubits: int) -> str:
    return 'concurrence' if n_qubits == 2 else 'w_fidelity'


def measure_series(source: Source, kind: str) -> np.ndarray:
    """Evaluate a measure at every grid point of a trajectory or ensemble mean"""
    if kind not in _MEASURES:
        raise ValueError(f"unknown measure {kind!r}; choose from {MEASURE_KINDS}")
    states = source.mean_states if isinstance(source, EnsembleResult) else source.states
    measure = _MEASURES[kind]
    return np.array([measure(rho) for rho in states])


# ========== EVENTS ==========

def _refine_peak(grid: np.ndarray, series: np.ndarray, i: int) -> Tuple[float, float]:
    """Vertex of the parabola through points i-1, i, i+1 (grid assumed uniform)"""
    if i == 0 or i == len(series) - 1:
        return float(grid[i]), float(series[i])
    y_minus, y_mid, y_plus = series[i - 1], series[i], series[i + 1]
    curvature = y_plus - 2 * y_mid + y_minus
    if curvature >= 0:
        return float(grid[i]), float(y_mid)
    offset = 0.5 * (y_minus - y_plus) / curvature
    dt = grid[i + 1] - grid[i]
    value = y_mid - (y_plus - y_minus) ** 2 / (8 * curvature)
    return float(grid[i] + offset * dt), float(value)


def find_gate_event(source: Source, target: str) -> GateReport:
    """
    Highest peak of the target population, refined quadratically.

    Every local maximum (endpoints included) is refined first; peaks within
    PEAK_TIE_TOL of the highest count as ties and the earliest one wins.
    """
    grid = np.asarray(source.grid)
    if grid.size == 0:
        raise ValueError("empty time grid")
    series = source.populations()[:, basis_index(target)]
    rising = np.r_[True, series[1:] >= series[:-1]]
    falling = np.r_[series[:-1] >= series[1:], True]
    peaks = [_refine_peak(grid, series, i) for i in np.flatnonzero(rising & falling)]
    highest = max(value for _, value in peaks)
    t_g, peak = next((t, value) for t, value in peaks if value >= highest - PEAK_TIE_TOL)
    return GateReport(target_state=target, gate_time=t_g, peak_probability=float(np.clip(peak, 0.0, 1.0)))


def find_entanglement_events(
    source: Source,
    measure_kind: str,
    threshold: float = 0.9,
    series: Optional[np.ndarray] = None,
) -> EntanglementReport:
    """
    Interior local maxima of a measure at or above threshold x its global maximum.

    Args:
        source: trajectory or ensemble mean
        measure_kind: one of MEASURE_KINDS
        threshold: fraction of the global maximum an event must reach
        series: precomputed measure values on source.grid

    Returns:
        EntanglementReport with ascending times; empty if the measure is identically zero
    """
    grid = np.asarray(source.grid)
    if series is None:
        series = measure_series(source, measure_kind)
    if series.size < 3 or np.max(series) <= 1e-12:
        return EntanglementReport(measure_kind=measure_kind)
    floor = threshold * np.max(series)
    times, values = [], []
    for i in range(1, series.size - 1):
        if series[i] >= series[i - 1] and series[i] > series[i + 1] and series[i] >= floor:
            t, value = _refine_peak(grid, series, i)
            times.append(t)
            values.append(value)
    return EntanglementReport(measure_kind=measure_kind, times=times, values=values)


# ========== TRUTH TABLES ==========

def swap_permutation() -> Dict[str, str]:
    return {'00': '00', '01': '10', '10': '01', '11': '11'}


def cswap_permutation(control: int = 1, targets: Sequence[int] = (2, 3)) -> Dict[str, str]:
    """Fredkin table: swap the target bits when the control bit is 1"""
    a, b = targets
    if sorted((control, a, b)) != [1, 2, 3]:
        raise ValueError(f"control {control} and targets {tuple(targets)} must be the three qubits 1, 2, 3")
    table = {}
    for index in range(8):
        bits = list(basis_label(index, 3))
        if bits[control - 1] == '1':
            bits[a - 1], bits[b - 1] = bits[b - 1], bits[a - 1]
        table[basis_label(index, 3)] = ''.join(bits)
    return table


def ideal_permutation(n_qubits: int) -> Dict[str, str]:
    return swap_permutation() if n_qubits == 2 else cswap_permutation()


def truth_table(scenario, t_g: float) -> TruthTable:
    """
    Evolve every basis input to t_g and record its most probable output.

    The scenario must be noiseless and free of disorder.
    """
    if not scenario.is_noiseless or scenario.is_random:
        raise ConfigurationError(f"truth tables need a noiseless, deterministic scenario; {scenario.name!r} is not")
    if t_g <= 0:
        raise ValueError(f"gate time must be > 0, got {t_g}")
    config = replace(scenario.integrator, t_max=float(t_g), grid_points=2)
    system = scenario.system_for({})
    rows = {}
    for index in range(2 ** scenario.qubits):
        label = basis_label(index, scenario.qubits)
        final = integrate(system, basis_state(label), config).states[-1]
        probs = populations(final)
        best = int(np.argmax(probs))
        probability = float(np.clip(probs[best], 0.0, 1.0))
        rows[label] = TruthRow(output=basis_label(best, scenario.qubits), probability=probability)
    logger.debug("Truth table of %s at t=%.4f: %s", scenario.name, t_g, rows)
    return TruthTable(t_g=float(t_g), rows=rows)
