"""
Disorder ensembles

Each realization draws its random parameters once (uniform on [lo, hi]) from
a Philox generator keyed by (master_seed, k), integrates its own trajectory,
and is folded into a running compensated sum in index order. Results do not
depend on n_jobs or on completion order. Parameters in a joint draw share a
single value per realization.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Protocol, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from .dynamics import IntegratorConfig, LindbladSystem, Trajectory, check_trajectory, integrate
from .exceptions import NumericalError, RealizationError

logger = logging.getLogger(__name__)

# Draw order is fixed so realization k sees the same stream for any subset of parameters
RANDOMIZABLE = ('g_m', 'g', 'eta', 'gamma_down', 'gamma_up')
NOISE_PARAMETERS = ('gamma_down', 'gamma_up', 'eta')
NOISE_POLICIES = ('shared', 'independent')

Draw = Union[float, Tuple[float, ...]]


@dataclass(frozen=True)
class UniformRange:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty range [{self.lo}, {self.hi}]")

    def draw(self, rng: np.random.Generator) -> float:
        if self.lo == self.hi:
            return float(self.lo)
        return float(rng.uniform(self.lo, self.hi))

    @property
    def mean(self) -> float:
        return 0.5 * (self.lo + self.hi)


@dataclass(frozen=True)
class RandomSpec:
    """
    Which parameters are random and how they are drawn.

    Attributes:
        ranges: parameter name -> UniformRange; names from RANDOMIZABLE
        coupling_ratios: (g12, g23, g13) = g * ratios for the joint draw 'g'
        noise_policy: 'shared' draws one rate per channel for all qubits,
            'independent' draws one per qubit and channel
        joint: parameters that take a single common draw (same range required)
    """
    ranges: Mapping[str, UniformRange] = field(default_factory=dict)
    coupling_ratios: Tuple[float, float, float] = (1.0, 1.0, 0.5)
    noise_policy: str = 'shared'
    joint: Tuple[str, ...] = ()

    def __post_init__(self):
        unknown = set(self.ranges) - set(RANDOMIZABLE)
        if unknown:
            raise ValueError(f"cannot randomize {sorted(unknown)}; choose from {RANDOMIZABLE}")
        if 'g' in self.ranges and 'g_m' in self.ranges:
            raise ValueError("'g' (three-qubit joint draw) and 'g_m' (two-qubit) are exclusive")
        if self.noise_policy not in NOISE_POLICIES:
            raise ValueError(f"noise_policy must be one of {NOISE_POLICIES}, got {self.noise_policy!r}")
        if len(self.coupling_ratios) != 3 or min(self.coupling_ratios) < 0:
            raise ValueError(f"coupling_ratios must be three values >= 0, got {self.coupling_ratios}")
        for name, bounds in self.ranges.items():
            if bounds.lo < 0:
                raise ValueError(f"{name} range must be non-negative, got [{bounds.lo}, {bounds.hi}]")
        if self.joint:
            self._validate_joint()

    def _validate_joint(self):
        missing = [name for name in self.joint if name not in self.ranges]
        if missing:
            raise ValueError(f"joint draw names parameters that are not random: {missing}")
        if len(set(self.joint)) < 2:
            raise ValueError(f"a joint draw needs at least two distinct parameters, got {list(self.joint)}")
        ranges = [self.ranges[name] for name in self.joint]
        if len(set(ranges)) > 1:
            raise ValueError(f"jointly drawn parameters need the same range, got {ranges}")
        if self.noise_policy == 'independent' and set(self.joint) - set(NOISE_PARAMETERS):
            raise ValueError("a joint draw with a coupling needs the shared noise policy")

    @property
    def is_random(self) -> bool:
        return bool(self.ranges)


@dataclass(frozen=True)
class EnsembleConfig:
    realizations: int = 1
    master_seed: int = 20240601
    n_jobs: int = 1

    def __post_init__(self):
        if self.realizations < 1:
            raise ValueError(f"realizations must be >= 1, got {self.realizations}")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ValueError(f"master_seed must fit in 64 bits, got {self.master_seed}")
        if self.n_jobs == 0:
            raise ValueError("n_jobs must be non-zero (negative values count back from the CPU count)")

    @classmethod
    def from_settings(cls, **overrides) -> 'EnsembleConfig':
        from django.conf import settings

        values = {
            'master_seed': settings.SIMULATION['DEFAULT_SEED'],
            'n_jobs': settings.SIMULATION['N_JOBS'],
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def generator(self, k: int) -> np.random.Generator:
        """Counter-based stream for realization k, reproducible in isolation"""
        seed = np.random.SeedSequence(self.master_seed, spawn_key=(k,))
        return np.random.Generator(np.random.Philox(seed))


@dataclass(frozen=True)
class Realization:
    k: int
    draws: Dict[str, Draw]


class EnsembleScenario(Protocol):
    """What run_ensemble needs from a scenario"""
    integrator: IntegratorConfig

    def system_for(self, draws: Mapping[str, Draw]) -> LindbladSystem: ...

    def initial_state(self) -> np.ndarray: ...


@dataclass(eq=False)
class EnsembleResult:
    """Arithmetic mean over realizations of the density matrix on the grid"""
    grid: np.ndarray
    mean_states: np.ndarray
    population_stderr: np.ndarray
    realizations: int
    master_seed: int
    draw_means: Dict[str, float] = field(default_factory=dict)
    nfev: int = 0

    def populations(self) -> np.ndarray:
        return np.real(np.diagonal(self.mean_states, axis1=-2, axis2=-1)).copy()

    def as_trajectory(self) -> Trajectory:
        return Trajectory(grid=self.grid, states=self.mean_states, nfev=self.nfev, message='ensemble mean')


def sample_realization(
    spec: RandomSpec,
    k: int,
    cfg: EnsembleConfig,
    n_qubits: int = 2,
) -> Realization:
    """
    Draw realization k's random parameters.

    Args:
        spec: randomized parameters and their ranges
        k: realization index, 0 <= k < cfg.realizations
        cfg: ensemble size and master seed
        n_qubits: register size (for per-qubit noise draws)

    Returns:
        Realization whose draws hold a float per parameter, or a tuple of
        n_qubits floats for noise under the 'independent' policy; jointly
        drawn parameters hold the same value
    """
    if not 0 <= k < cfg.realizations:
        raise ValueError(f"realization index {k} out of range for N={cfg.realizations}")
    rng = cfg.generator(k)
    draws: Dict[str, Draw] = {}
    shared: Optional[Draw] = None
    for name in RANDOMIZABLE:
        bounds = spec.ranges.get(name)
        if bounds is None:
            continue
        if name in spec.joint and shared is not None:
            draws[name] = shared
            continue
        if name in NOISE_PARAMETERS and spec.noise_policy == 'independent':
            draws[name] = tuple(bounds.draw(rng) for _ in range(n_qubits))
        else:
            draws[name] = bounds.draw(rng)
        if name in spec.joint:
            shared = draws[name]
    return Realization(k=k, draws=draws)


class _CompensatedSum:
    """Kahan summation over arrays, one addend at a time"""

    def __init__(self, shape, dtype):
        self.total = np.zeros(shape, dtype=dtype)
        self._carry = np.zeros(shape, dtype=dtype)

    def add(self, value: np.ndarray) -> None:
        y = value - self._carry
        t = self.total + y
        self._carry = (t - self.total) - y
        self.total = t


def _run_realization(scenario: EnsembleScenario, spec: RandomSpec, cfg: EnsembleConfig, k: int, n_qubits: int):
    realization = sample_realization(spec, k, cfg, n_qubits)
    try:
        system = scenario.system_for(realization.draws)
        trajectory = integrate(system, scenario.initial_state(), scenario.integrator, check=True)
    except (NumericalError, ValueError) as exc:
        # Exceptions cross process boundaries as text
        return realization, None, 0, f"{type(exc).__name__}: {exc}"
    return realization, trajectory.states, trajectory.nfev, None


def run_ensemble(
    scenario: EnsembleScenario,
    spec: RandomSpec,
    cfg: EnsembleConfig,
) -> EnsembleResult:
    """
    Average cfg.realizations independent trajectories of scenario.

    Raises:
        RealizationError: the first failing realization (lowest k), with its index
    """
    grid = scenario.integrator.grid
    rho0 = scenario.initial_state()
    dim = rho0.shape[0]
    n_qubits = int(round(np.log2(dim)))
    n = cfg.realizations

    logger.info(
        "Ensemble start: N=%d seed=%d n_jobs=%d randomized=%s policy=%s",
        n, cfg.master_seed, cfg.n_jobs, sorted(spec.ranges), spec.noise_policy,
    )
    started = time.perf_counter()

    states_sum = _CompensatedSum((grid.size, dim, dim), complex)
    pop_sum = _CompensatedSum((grid.size, dim), float)
    pop_sq_sum = _CompensatedSum((grid.size, dim), float)
    draw_sums: Dict[str, float] = {}
    nfev = 0

    tasks = (delayed(_run_realization)(scenario, spec, cfg, k, n_qubits) for k in range(n))
    results = Parallel(n_jobs=cfg.n_jobs, return_as='generator')(tasks)
    for realization, states, realization_nfev, error in results:
        if error is not None:
            raise RealizationError(realization.k, error)
        logger.debug("Realization %d draws=%s nfev=%d", realization.k, realization.draws, realization_nfev)
        states_sum.add(states)
        populations = np.real(np.diagonal(states, axis1=-2, axis2=-1))
        pop_sum.add(populations)
        pop_sq_sum.add(populations ** 2)
        for name, value in realization.draws.items():
            draw_sums[name] = draw_sums.get(name, 0.0) + float(np.mean(value))
        nfev += realization_nfev

    mean_states = states_sum.total / n
    mean_pops = pop_sum.total / n
    if n > 1:
        variance = np.maximum(pop_sq_sum.total - n * mean_pops ** 2, 0.0) / (n - 1)
        stderr = np.sqrt(variance / n)
    else:
        stderr = np.zeros_like(mean_pops)

    result = EnsembleResult(
        grid=grid,
        mean_states=mean_states,
        population_stderr=stderr,
        realizations=n,
        master_seed=cfg.master_seed,
        draw_means={name: total / n for name, total in draw_sums.items()},
        nfev=nfev,
    )
    threshold = 10 * scenario.integrator.abs_tol
    check_trajectory(result.as_trajectory(), threshold, threshold, threshold)
    logger.info("Ensemble done: N=%d in %.2fs (nfev=%d)", n, time.perf_counter() - started, nfev)
    return result
