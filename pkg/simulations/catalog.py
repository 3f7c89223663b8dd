"""
Preset scenarios

Two-qubit presets start from |01> at resonance (omega1 = omega2 = 1) with the
flip-flop Hamiltonian; three-qubit presets start from |101> with
omega = (1, 0.5, 1) and g12 = g23 = 2 g13. Random quantities are uniform on
[0, 1]; two-qubit ensembles use 1500 realizations, three-qubit ones 150.
The all-noise presets draw eta = gamma_down = gamma_up as one value per
realization (fig2g ties g_m to the same draw).
"""

from typing import Dict, List

from circuits.hamiltonians import ConstantCoupling, UniformRandomCoupling

from .disorder import EnsembleConfig
from .dynamics import NoiseRates
from .exceptions import ConfigurationError
from .scenarios import ScenarioSpec

UNIT = (0.0, 1.0)
TWO_QUBIT_REALIZATIONS = 1500
THREE_QUBIT_REALIZATIONS = 150


def _two_qubit(name, description, coupling=None, random_noise=None, joint_draw=(),
               realizations=TWO_QUBIT_REALIZATIONS, reference_values=True):
    return ScenarioSpec(
        name=name,
        qubits=2,
        frequencies=(1.0, 1.0),
        couplings=(coupling or ConstantCoupling(1.0),),
        initial='01',
        noise=NoiseRates(),
        random_noise=random_noise or {},
        joint_draw=joint_draw,
        ensemble=EnsembleConfig(realizations=realizations),
        description=description,
        reference_values=reference_values,
    )


def _three_qubit(name, description, random_coupling=False, random_noise=None, joint_draw=(),
                 realizations=THREE_QUBIT_REALIZATIONS):
    if random_coupling:
        couplings = (UniformRandomCoupling(0.0, 1.0), UniformRandomCoupling(0.0, 1.0), UniformRandomCoupling(0.0, 0.5))
    else:
        couplings = (ConstantCoupling(1.0), ConstantCoupling(1.0), ConstantCoupling(0.5))
    return ScenarioSpec(
        name=name,
        qubits=3,
        frequencies=(1.0, 0.5, 1.0),
        couplings=couplings,
        initial='101',
        noise=NoiseRates(),
        random_noise=random_noise or {},
        joint_draw=joint_draw,
        ensemble=EnsembleConfig(realizations=realizations),
        description=description,
    )


def _build() -> Dict[str, ScenarioSpec]:
    all_noise = {'eta': UNIT, 'gamma_down': UNIT, 'gamma_up': UNIT}
    noise_names = tuple(all_noise)
    presets: List[ScenarioSpec] = [
        _two_qubit('fig2a', 'Ideal SWAP, constant g_m = 1, no noise', realizations=1),
        _two_qubit('fig2b', 'SWAP with random coupling g_m ~ U[0, 1]', coupling=UniformRandomCoupling(0.0, 1.0)),
        _two_qubit('fig2c', 'g_m = 1 with random dephasing eta ~ U[0, 1]', random_noise={'eta': UNIT}),
        _two_qubit('fig2d', 'g_m = 1 with random emission gamma_down ~ U[0, 1]', random_noise={'gamma_down': UNIT}),
        _two_qubit('fig2e', 'g_m = 1 with random absorption gamma_up ~ U[0, 1]', random_noise={'gamma_up': UNIT}),
        _two_qubit(
            'fig2f', 'g_m = 1, eta = gamma_down = gamma_up ~ U[0, 1] (one draw)',
            random_noise=all_noise, joint_draw=noise_names,
        ),
        _two_qubit(
            'fig2g', 'g_m = eta = gamma_down = gamma_up ~ U[0, 1] (one draw, no reference values)',
            coupling=UniformRandomCoupling(0.0, 1.0), random_noise=all_noise, joint_draw=('g_m',) + noise_names,
            reference_values=False,
        ),
        _three_qubit('fig4a', 'Ideal three-qubit exchange, g = (1, 1, 0.5), no noise', realizations=1),
        _three_qubit('fig4b', 'Joint random coupling g12 = g23 = 2 g13 = g ~ U[0, 1]', random_coupling=True),
        _three_qubit('fig4c', 'g = (1, 1, 0.5) with random dephasing', random_noise={'eta': UNIT}),
        _three_qubit('fig4d', 'g = (1, 1, 0.5) with random emission', random_noise={'gamma_down': UNIT}),
        _three_qubit('fig4e', 'g = (1, 1, 0.5) with random absorption', random_noise={'gamma_up': UNIT}),
        _three_qubit(
            'fig4f', 'g = (1, 1, 0.5), eta = gamma_down = gamma_up ~ U[0, 1] (one draw)', random_noise=all_noise,
            joint_draw=noise_names,
        ),
    ]
    return {spec.name: spec for spec in presets}


_CATALOG = _build()


def catalog() -> Dict[str, ScenarioSpec]:
    """Named presets, in display order"""
    return dict(_CATALOG)


def get_scenario(name: str) -> ScenarioSpec:
    try:
        return _CATALOG[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown scenario {name!r}; available: {', '.join(_CATALOG)}",
            {'scenario': f"unknown scenario {name!r}"},
        ) from None
