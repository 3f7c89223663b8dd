"""
Lindblad dynamics

drho/dt = -i [H(t), rho] + sum_j ( gamma_down D[s_j-] + gamma_up D[s_j+] + eta D[s_j^z] ) rho

with D[L] rho = L rho L^dagger - 1/2 {L^dagger L, rho}. Dephasing enters with
rate eta and no extra factor 1/2.

Two propagators are provided:
- integrate: adaptive embedded Runge-Kutta (scipy solve_ivp) on the complex
  density matrix, sampled on a uniform grid
- propagate_expm: matrix exponential of the column-stacked Liouvillian,
  used as an independent reference for time-independent Hamiltonians
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from circuits.qops import (
    DensityMatrix,
    Operator,
    PauliKind,
    check_density_matrix,
    dagger,
    embed,
    pauli,
    qubit_count,
)

from .exceptions import IntegrationError, InvariantViolation

logger = logging.getLogger(__name__)

Hamiltonian = Union[Operator, Callable[[float], Operator]]
Channel = Tuple[Operator, float]

METHODS = ('DOP853', 'RK45', 'RK23')
TRACE_WARNING = 1e-10


# ========== CONFIGURATION ==========

@dataclass(frozen=True)
class NoiseRates:
    """Emission, absorption and dephasing rates applied to every qubit"""
    gamma_down: float = 0.0
    gamma_up: float = 0.0
    eta: float = 0.0

    def __post_init__(self):
        for name in ('gamma_down', 'gamma_up', 'eta'):
            if getattr(self, name) < 0:
                raise ValueError(f"noise rate {name} must be >= 0, got {getattr(self, name)}")

    @property
    def is_noiseless(self) -> bool:
        return self.gamma_down == 0 and self.gamma_up == 0 and self.eta == 0


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    t_max: float = 10.0
    grid_points: int = 1001
    method: str = 'DOP853'

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError(f"tolerances must be > 0, got rtol={self.rel_tol}, atol={self.abs_tol}")
        if self.grid_points < 2:
            raise ValueError(f"grid_points must be >= 2, got {self.grid_points}")
        if self.t_max <= 0:
            raise ValueError(f"t_max must be > 0, got {self.t_max}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {', '.join(METHODS)}, got {self.method!r}")

    @classmethod
    def from_settings(cls, **overrides) -> 'IntegratorConfig':
        """Defaults from settings.SIMULATION, then explicit overrides (None is ignored)"""
        from django.conf import settings

        defaults = settings.SIMULATION
        values = {
            'rel_tol': defaults['RTOL'],
            'abs_tol': defaults['ATOL'],
            't_max': defaults['T_MAX'],
            'grid_points': defaults['GRID_POINTS'],
            'method': defaults['METHOD'],
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.grid_points)


def noise_channels(n: int, rates: Union[NoiseRates, Sequence[NoiseRates]]) -> List[Channel]:
    """
    Collapse operators with their rates for an n-qubit register.

    Args:
        n: qubit count
        rates: one NoiseRates shared by every qubit, or one per qubit

    Returns:
        List of (embedded operator, rate); zero-rate channels are omitted
    """
    per_qubit = [rates] * n if isinstance(rates, NoiseRates) else list(rates)
    if len(per_qubit) != n:
        raise ValueError(f"need noise rates for {n} qubits, got {len(per_qubit)}")
    channels = []
    for site, qubit_rates in enumerate(per_qubit, start=1):
        for kind, rate in (
            (PauliKind.MINUS, qubit_rates.gamma_down),
            (PauliKind.PLUS, qubit_rates.gamma_up),
            (PauliKind.Z, qubit_rates.eta),
        ):
            if rate > 0:
                channels.append((embed(pauli(kind), site, n), float(rate)))
    return channels


@dataclass(eq=False)
class LindbladSystem:
    """
    A Hamiltonian (matrix or callable H(t)) plus weighted collapse operators.

    The jump stacks and the effective non-Hermitian Hamiltonian term are
    precomputed once; the instance is not mutated afterwards.
    """
    hamiltonian: Hamiltonian
    channels: Sequence[Channel] = ()
    dim: int = field(init=False)
    _jumps: np.ndarray = field(init=False, repr=False, compare=False)
    _jumps_dag: np.ndarray = field(init=False, repr=False, compare=False)
    _rates: np.ndarray = field(init=False, repr=False, compare=False)
    _decay: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sample = self.hamiltonian(0.0) if callable(self.hamiltonian) else self.hamiltonian
        sample = np.asarray(sample, dtype=complex)
        if sample.ndim != 2 or sample.shape[0] != sample.shape[1]:
            raise ValueError(f"Hamiltonian must be square, got shape {sample.shape}")
        self.dim = sample.shape[0]
        qubit_count(self.dim)
        if not callable(self.hamiltonian):
            self.hamiltonian = sample

        self.channels = tuple((np.asarray(op, dtype=complex), float(rate)) for op, rate in self.channels)
        for op, rate in self.channels:
            if op.shape != (self.dim, self.dim):
                raise ValueError(f"collapse operator shape {op.shape} does not match dim {self.dim}")
            if rate < 0:
                raise ValueError(f"channel rate must be >= 0, got {rate}")

        if self.channels:
            self._jumps = np.stack([op for op, _ in self.channels])
            self._rates = np.array([rate for _, rate in self.channels]).reshape(-1, 1, 1)
        else:
            self._jumps = np.zeros((0, self.dim, self.dim), dtype=complex)
            self._rates = np.zeros((0, 1, 1))
        self._jumps_dag = np.conj(np.swapaxes(self._jumps, -1, -2))
        self._decay = np.sum(self._rates * (self._jumps_dag @ self._jumps), axis=0)

    @classmethod
    def with_noise(cls, hamiltonian: Hamiltonian, rates, n: Optional[int] = None) -> 'LindbladSystem':
        if n is None:
            sample = hamiltonian(0.0) if callable(hamiltonian) else hamiltonian
            n = qubit_count(np.asarray(sample).shape[0])
        return cls(hamiltonian, noise_channels(n, rates))

    @property
    def is_time_dependent(self) -> bool:
        return callable(self.hamiltonian)

    @property
    def n_qubits(self) -> int:
        return qubit_count(self.dim)

    def hamiltonian_at(self, t: float) -> Operator:
        if self.is_time_dependent:
            return np.asarray(self.hamiltonian(t), dtype=complex)
        return self.hamiltonian

    def effective_hamiltonian(self, t: float) -> Operator:
        """H - (i/2) sum rate L^dagger L"""
        return self.hamiltonian_at(t) - 0.5j * self._decay


@dataclass(eq=False)
class Trajectory:
    """Density matrices on a uniform time grid"""
    grid: np.ndarray
    states: np.ndarray
    nfev: int = 0
    message: str = ''

    @property
    def dim(self) -> int:
        return self.states.shape[-1]

    @property
    def n_qubits(self) -> int:
        return qubit_count(self.dim)

    def populations(self) -> np.ndarray:
        """Real diagonal of every state, shape (grid points, dim)"""
        return np.real(np.diagonal(self.states, axis1=-2, axis2=-1)).copy()

    def at(self, t: float) -> DensityMatrix:
        """State at the grid point closest to t"""
        return self.states[int(np.argmin(np.abs(self.grid - t)))]


# ========== EQUATION OF MOTION ==========

def dissipator(L: Operator, rho: DensityMatrix) -> Operator:
    """D[L] rho = L rho L^dagger - 1/2 (L^dagger L rho + rho L^dagger L)"""
    L = np.asarray(L, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    if L.shape != rho.shape:
        raise ValueError(f"operator shape {L.shape} does not match state shape {rho.shape}")
    l_dag = dagger(L)
    number = l_dag @ L
    return L @ rho @ l_dag - 0.5 * (number @ rho + rho @ number)


def lindblad_rhs(t: float, rho: DensityMatrix, system: LindbladSystem) -> Operator:
    """
    Right-hand side of the master equation at time t.

    Uses the effective Hamiltonian form -i(H_eff rho - rho H_eff^dagger) +
    sum rate L rho L^dagger, which equals the commutator plus dissipators.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (system.dim, system.dim):
        raise ValueError(f"state shape {rho.shape} does not match system dim {system.dim}")
    h_eff = system.effective_hamiltonian(t)
    drho = -1j * (h_eff @ rho - rho @ dagger(h_eff))
    if system.channels:
        drho = drho + np.sum(system._rates * (system._jumps @ rho @ system._jumps_dag), axis=0)
    return drho


def check_trajectory(
    trajectory: Trajectory,
    trace_tol: float,
    hermiticity_tol: float,
    positivity_tol: float,
) -> Dict[str, float]:
    """
    Worst trace drift, Hermiticity error and most negative eigenvalue over the grid.

    Raises:
        InvariantViolation: if any of them exceeds its tolerance
    """
    states = trajectory.states
    traces = np.trace(states, axis1=-2, axis2=-1)
    adjoint = np.conj(np.swapaxes(states, -1, -2))
    report = {
        'trace_drift': float(np.max(np.abs(traces - 1.0))),
        'hermiticity': float(np.max(np.abs(states - adjoint))),
        'min_eigenvalue': float(np.min(np.linalg.eigvalsh(0.5 * (states + adjoint)))),
    }
    failures = []
    if report['trace_drift'] > trace_tol:
        failures.append(f"trace drift {report['trace_drift']:.3e}")
    if report['hermiticity'] > hermiticity_tol:
        failures.append(f"hermiticity error {report['hermiticity']:.3e}")
    if report['min_eigenvalue'] < -positivity_tol:
        failures.append(f"negative eigenvalue {report['min_eigenvalue']:.3e}")
    if failures:
        raise InvariantViolation('density matrix invariants violated: ' + ', '.join(failures), report)
    if report['trace_drift'] > TRACE_WARNING:
        logger.warning("Trace drift %.3e above %.0e (within tolerance)", report['trace_drift'], TRACE_WARNING)
    return report


def integrate(
    system: LindbladSystem,
    rho0: DensityMatrix,
    config: Optional[IntegratorConfig] = None,
    check: bool = True,
) -> Trajectory:
    """
    Integrate the master equation from rho0 over config.grid.

    Args:
        system: Hamiltonian and channels
        rho0: initial density matrix
        config: tolerances, grid and Runge-Kutta pair; IntegratorConfig() if None
        check: verify trace, Hermiticity and positivity afterwards

    Returns:
        Trajectory on the uniform grid (no renormalization applied)

    Raises:
        IntegrationError: the integrator gave up before t_max
        InvariantViolation: a state drifted more than 10 x abs_tol
    """
    config = config or IntegratorConfig()
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (system.dim, system.dim):
        raise ValueError(f"initial state shape {rho0.shape} does not match system dim {system.dim}")
    check_density_matrix(rho0)

    dim = system.dim
    grid = config.grid

    def rhs(t, y):
        return lindblad_rhs(t, y.reshape(dim, dim), system).ravel()

    solution = solve_ivp(
        rhs,
        (grid[0], grid[-1]),
        rho0.ravel(),
        method=config.method,
        t_eval=grid,
        rtol=config.rel_tol,
        atol=config.abs_tol,
    )
    if solution.status != 0:
        t_reached = float(solution.t[-1]) if solution.t.size else 0.0
        raise IntegrationError(solution.message, t_reached)

    states = solution.y.T.reshape(-1, dim, dim)
    trajectory = Trajectory(grid=grid, states=states, nfev=int(solution.nfev), message=solution.message)
    logger.debug("Integrated dim=%d on %d points with %s: nfev=%d", dim, grid.size, config.method, solution.nfev)

    if check:
        threshold = 10 * config.abs_tol
        check_trajectory(trajectory, threshold, threshold, threshold)
    return trajectory


# ========== LIOUVILLIAN REFERENCE ==========

def liouvillian(system: LindbladSystem) -> np.ndarray:
    """
    Column-stacked superoperator of a time-independent system:
    -i(I x H - H^T x I) + sum rate (conj(L) x L - 1/2 I x L^dag L - 1/2 (L^dag L)^T x I)
    """
    if system.is_time_dependent:
        raise ValueError("the Liouvillian needs a time-independent Hamiltonian")
    h = system.hamiltonian
    identity = np.eye(system.dim, dtype=complex)
    generator = -1j * (np.kron(identity, h) - np.kron(h.T, identity))
    for op, rate in system.channels:
        number = dagger(op) @ op
        generator += rate * (
            np.kron(np.conj(op), op)
            - 0.5 * np.kron(identity, number)
            - 0.5 * np.kron(number.T, identity)
        )
    return generator


def propagate_expm(system: LindbladSystem, rho0: DensityMatrix, grid: Sequence[float]) -> Trajectory:
    """
    rho(t) = unvec(expm(t L) vec(rho0)) on every grid time.

    Independent of the Runge-Kutta path: scipy.linalg.expm evaluates each
    exponential by scaling and squaring.
    """
    generator = liouvillian(system)
    grid = np.asarray(grid, dtype=float)
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (system.dim, system.dim):
        raise ValueError(f"initial state shape {rho0.shape} does not match system dim {system.dim}")
    vec0 = rho0.ravel(order='F')
    propagators = expm(grid[:, None, None] * generator)
    vectors = propagators @ vec0
    states = vectors.reshape(-1, system.dim, system.dim).transpose(0, 2, 1)
    return Trajectory(grid=grid, states=states, message='expm')
