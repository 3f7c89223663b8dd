"""
Scenario definitions: the physical system, its noise and disorder, the
initial state and the numerical settings of one run.
"""

from dataclasses import dataclass, field, replace
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from circuits.hamiltonians import (
    ConstantCoupling,
    CouplingModel,
    ParametricCoupling,
    ThreeQubitParams,
    TwoQubitParams,
    UniformRandomCoupling,
    build_rwa_two,
    build_three,
    lab_frame_callback,
    rotating_frame_callback,
)
from circuits.qops import DensityMatrix, basis_state

from .disorder import NOISE_PARAMETERS, Draw, EnsembleConfig, RandomSpec, UniformRange
from .dynamics import IntegratorConfig, LindbladSystem, NoiseRates, noise_channels
from .exceptions import ConfigurationError

HAMILTONIAN_KINDS = ('rwa', 'rotating', 'lab')


@dataclass(frozen=True)
class ScenarioSpec:
    """
    One simulation setup.

    Random couplings are written as UniformRandomCoupling: for two qubits
    g_m is drawn directly; for three qubits all three couplings must be
    uniform and proportional, and are drawn jointly as g * ratios.
    Random noise rates come from random_noise (name -> (lo, hi)). Parameters
    listed in joint_draw (noise rates, and g_m or g) share one draw per
    realization.
    """
    name: str
    qubits: int
    frequencies: Tuple[float, ...]
    couplings: Tuple[CouplingModel, ...]
    initial: str
    noise: NoiseRates = field(default_factory=NoiseRates)
    random_noise: Mapping[str, Tuple[float, float]] = field(default_factory=dict)
    noise_policy: str = 'shared'
    joint_draw: Tuple[str, ...] = ()
    hamiltonian: str = 'rwa'
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    ensemble: EnsembleConfig = field(default_factory=EnsembleConfig)
    description: str = ''
    reference_values: bool = True

    def __post_init__(self):
        errors = self._validate()
        if errors:
            raise ConfigurationError(
                f"invalid scenario {self.name!r}: " + '; '.join(f"{k}: {v}" for k, v in errors.items()),
                errors,
            )

    def _validate(self) -> Dict[str, str]:
        errors = {}
        if self.qubits not in (2, 3):
            errors['qubits'] = f"must be 2 or 3, got {self.qubits}"
            return errors
        if len(self.frequencies) != self.qubits:
            errors['frequencies'] = f"need {self.qubits} frequencies, got {len(self.frequencies)}"
        elif min(self.frequencies) <= 0:
            errors['frequencies'] = "frequencies must be > 0"
        expected_couplings = 1 if self.qubits == 2 else 3
        if len(self.couplings) != expected_couplings:
            errors['couplings'] = f"need {expected_couplings} coupling(s), got {len(self.couplings)}"
        elif self.qubits == 3:
            kinds = {type(c) for c in self.couplings}
            if ParametricCoupling in kinds:
                errors['couplings'] = "three-qubit couplings must be constant or uniform"
            elif len(kinds) > 1:
                errors['couplings'] = "three-qubit couplings are either all constant or all uniform"
            elif kinds == {UniformRandomCoupling}:
                try:
                    self._joint_coupling()
                except ValueError as exc:
                    errors['couplings'] = str(exc)
        if len(self.initial) != self.qubits or any(c not in '01' for c in self.initial):
            errors['initial'] = f"expected a {self.qubits}-bit label, got {self.initial!r}"
        if self.hamiltonian not in HAMILTONIAN_KINDS:
            errors['hamiltonian'] = f"must be one of {HAMILTONIAN_KINDS}, got {self.hamiltonian!r}"
        elif self.hamiltonian != 'rwa' and self.qubits != 2:
            errors['hamiltonian'] = "rotating and lab frames are two-qubit only"
        elif self.hamiltonian != 'rwa' and isinstance(self.couplings[0], UniformRandomCoupling):
            errors['hamiltonian'] = "random couplings use the rwa Hamiltonian"
        unknown = set(self.random_noise) - set(NOISE_PARAMETERS)
        if unknown:
            errors['random_noise'] = f"unknown noise parameters {sorted(unknown)}"
        else:
            for name, bounds in self.random_noise.items():
                if len(bounds) != 2 or bounds[0] > bounds[1] or bounds[0] < 0:
                    errors['random_noise'] = f"{name} needs 0 <= lo <= hi, got {list(bounds)}"
        if 'couplings' not in errors and 'random_noise' not in errors:
            try:
                self.random_spec()
            except ValueError as exc:
                errors['joint_draw' if self.joint_draw else 'noise_policy'] = str(exc)
        return errors

    def _joint_coupling(self) -> Tuple[UniformRange, Tuple[float, float, float]]:
        """Range of g and the ratios of a joint three-qubit coupling draw"""
        g12, g23, g13 = self.couplings
        if g12.hi <= 0:
            raise ValueError("joint coupling draw needs g12 range with hi > 0")
        ratios = tuple(c.hi / g12.hi for c in (g12, g23, g13))
        for c, ratio in zip((g12, g23, g13), ratios):
            if not np.isclose(c.lo, g12.lo * ratio):
                raise ValueError("uniform three-qubit coupling ranges must be proportional (g12 : g23 : g13)")
        return UniformRange(g12.lo, g12.hi), ratios

    # ---------- disorder ----------

    def random_spec(self) -> RandomSpec:
        ranges = {name: UniformRange(*bounds) for name, bounds in self.random_noise.items()}
        ratios = (1.0, 1.0, 0.5)
        if self.qubits == 2 and isinstance(self.couplings[0], UniformRandomCoupling):
            coupling = self.couplings[0]
            ranges['g_m'] = UniformRange(coupling.lo, coupling.hi)
        elif self.qubits == 3 and isinstance(self.couplings[0], UniformRandomCoupling):
            ranges['g'], ratios = self._joint_coupling()
        return RandomSpec(
            ranges=ranges, coupling_ratios=ratios, noise_policy=self.noise_policy, joint=tuple(self.joint_draw),
        )

    @property
    def is_random(self) -> bool:
        return self.random_spec().is_random

    @property
    def is_noiseless(self) -> bool:
        return self.noise.is_noiseless and not self.random_noise

    # ---------- system construction ----------

    def initial_state(self) -> DensityMatrix:
        return basis_state(self.initial)

    def coupling_values(self, draws: Mapping[str, Draw]) -> Tuple[float, ...]:
        """Resonant coupling strengths after applying the draws"""
        if self.qubits == 2:
            coupling = self._two_qubit_coupling(draws)
            return (coupling.resonant_strength(),)
        if 'g' in draws:
            g = float(draws['g'])
            return tuple(g * ratio for ratio in self.random_spec().coupling_ratios)
        if any(isinstance(c, UniformRandomCoupling) for c in self.couplings):
            raise ValueError("random three-qubit couplings need a 'g' draw")
        return tuple(c.g_m for c in self.couplings)

    def _two_qubit_coupling(self, draws: Mapping[str, Draw]) -> CouplingModel:
        coupling = self.couplings[0]
        if isinstance(coupling, UniformRandomCoupling):
            if 'g_m' not in draws:
                raise ValueError("random coupling needs a 'g_m' draw")
            return coupling.realize(float(draws['g_m']))
        if 'g_m' in draws:
            return replace(coupling, g_m=float(draws['g_m']))
        return coupling

    def noise_for(self, draws: Mapping[str, Draw]):
        """NoiseRates, or one NoiseRates per qubit under the independent policy"""
        drawn = {name: draws[name] for name in NOISE_PARAMETERS if name in draws}
        if self.noise_policy == 'independent' and drawn:
            per_qubit = []
            for j in range(self.qubits):
                values = {name: (value[j] if isinstance(value, tuple) else value) for name, value in drawn.items()}
                per_qubit.append(replace(self.noise, **values))
            return per_qubit
        return replace(self.noise, **{name: float(value) for name, value in drawn.items()})

    def hamiltonian_for(self, draws: Mapping[str, Draw]):
        if self.qubits == 3:
            params = ThreeQubitParams(*self.frequencies, *(ConstantCoupling(g) for g in self.coupling_values(draws)))
            return build_three(params, self.coupling_values(draws))
        params = TwoQubitParams(*self.frequencies, self._two_qubit_coupling(draws))
        if self.hamiltonian == 'rotating':
            return rotating_frame_callback(params)
        if self.hamiltonian == 'lab':
            return lab_frame_callback(params)
        return build_rwa_two(params, params.coupling.resonant_strength())

    def system_for(self, draws: Optional[Mapping[str, Draw]] = None) -> LindbladSystem:
        draws = draws or {}
        return LindbladSystem(self.hamiltonian_for(draws), noise_channels(self.qubits, self.noise_for(draws)))

    def with_overrides(
        self,
        seed: Optional[int] = None,
        realizations: Optional[int] = None,
        t_max: Optional[float] = None,
        points: Optional[int] = None,
        n_jobs: Optional[int] = None,
        method: Optional[str] = None,
    ) -> 'ScenarioSpec':
        """Copy with command-line overrides applied (None leaves a value untouched)"""
        try:
            integrator = replace(
                self.integrator,
                **{k: v for k, v in (('t_max', t_max), ('grid_points', points), ('method', method)) if v is not None},
            )
            ensemble = replace(
                self.ensemble,
                **{k: v for k, v in (('master_seed', seed), ('realizations', realizations), ('n_jobs', n_jobs))
                   if v is not None},
            )
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from exc
        return replace(self, integrator=integrator, ensemble=ensemble)
