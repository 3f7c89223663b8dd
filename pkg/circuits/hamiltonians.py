"""
Hamiltonians of capacitively coupled transmon qubits

All energies are dimensionless (divided by hbar * omega_c) and times are in
units of 1/omega_c. The builders return dense complex matrices; the
time-dependent frames (rotating and lab) are exposed as reentrant callbacks
H(t) for the integrator.

Frames provided:
- lab frame: H0 + g(t) [XX + ZX + XZ + ZZ]
- rotating frame: exp(i H0 t) H_int exp(-i H0 t), flip-flop and double-flip terms
- RWA, two qubits: H0 + g (s1+ s2- + s1- s2+)
- RWA, three qubits: H0 + g12 (1<->2) + g23 (2<->3) + g13 (1<->3)
"""

from dataclasses import dataclass
from typing import Callable, Sequence, Tuple, Union

import numpy as np

from .qops import Operator, PauliKind, embed, pauli


# ========== COUPLING MODELS ==========

@dataclass(frozen=True)
class ConstantCoupling:
    """g(t) = g_m"""
    g_m: float
    kind = 'constant'

    def __post_init__(self):
        if self.g_m < 0:
            raise ValueError(f"constant coupling must be >= 0, got g_m={self.g_m}")

    def value(self, t: float) -> float:
        return self.g_m

    def resonant_strength(self) -> float:
        return self.g_m


@dataclass(frozen=True)
class ParametricCoupling:
    """g(t) = g0 + g_m cos(omega_m t), the modulated coupling capacitor"""
    g0: float
    g_m: float
    omega_m: float
    kind = 'parametric'

    def __post_init__(self):
        if self.omega_m <= 0:
            raise ValueError(f"modulation frequency must be > 0, got omega_m={self.omega_m}")

    def value(self, t: float) -> float:
        return self.g0 + self.g_m * np.cos(self.omega_m * t)

    def resonant_strength(self) -> float:
        # flip-flop strength kept at the full modulation amplitude, no factor 1/2
        return self.g_m


@dataclass(frozen=True)
class UniformRandomCoupling:
    """g_m drawn once per realization, uniform on [lo, hi]"""
    lo: float
    hi: float
    kind = 'uniform_random'

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty coupling range [{self.lo}, {self.hi}]")

    def value(self, t: float) -> float:
        raise ValueError("a random coupling has no value until it is drawn for a realization")

    def realize(self, g_m: float) -> ConstantCoupling:
        return ConstantCoupling(g_m)


CouplingModel = Union[ConstantCoupling, ParametricCoupling, UniformRandomCoupling]


# ========== PARAMETERS ==========

@dataclass(frozen=True)
class TwoQubitParams:
    omega1: float
    omega2: float
    coupling: CouplingModel

    def __post_init__(self):
        if self.omega1 <= 0 or self.omega2 <= 0:
            raise ValueError(f"qubit frequencies must be > 0, got ({self.omega1}, {self.omega2})")

    @property
    def omegas(self) -> Tuple[float, float]:
        return (self.omega1, self.omega2)


@dataclass(frozen=True)
class ThreeQubitParams:
    omega1: float
    omega2: float
    omega3: float
    g12: CouplingModel
    g23: CouplingModel
    g13: CouplingModel

    def __post_init__(self):
        if min(self.omegas) <= 0:
            raise ValueError(f"qubit frequencies must be > 0, got {self.omegas}")

    @property
    def omegas(self) -> Tuple[float, float, float]:
        return (self.omega1, self.omega2, self.omega3)

    @property
    def couplings(self) -> Tuple[CouplingModel, CouplingModel, CouplingModel]:
        return (self.g12, self.g23, self.g13)


# ========== BUILDING BLOCKS ==========

def _flip_flop(j: int, k: int, n: int) -> Operator:
    """s_j+ s_k- + s_j- s_k+"""
    plus, minus = pauli(PauliKind.PLUS), pauli(PauliKind.MINUS)
    forward = embed(plus, j, n) @ embed(minus, k, n)
    return forward + forward.conj().T


def build_h0(omegas: Sequence[float]) -> Operator:
    """
    Bare qubit Hamiltonian sum_j omega_j sigma_j^z / 2.

    Args:
        omegas: dimensionless qubit frequencies, one per qubit (1 to 3)

    Returns:
        Diagonal Hermitian matrix of dimension 2**len(omegas)
    """
    omegas = list(omegas)
    n = len(omegas)
    if n == 0:
        raise ValueError("build_h0 needs at least one qubit frequency")
    if n > 3:
        raise ValueError(f"at most 3 qubits are supported, got {n}")
    z = pauli(PauliKind.Z)
    return sum(0.5 * omega * embed(z, j, n) for j, omega in enumerate(omegas, start=1))


def build_hint_lab(g: float) -> Operator:
    """
    Lab-frame two-qubit interaction g [X1X2 + Z1X2 + X1Z2 + Z1Z2].
    """
    x, z = pauli(PauliKind.X), pauli(PauliKind.Z)
    x1, x2 = embed(x, 1, 2), embed(x, 2, 2)
    z1, z2 = embed(z, 1, 2), embed(z, 2, 2)
    return g * (x1 @ x2 + z1 @ x2 + x1 @ z2 + z1 @ z2)


def build_lab_frame(t: float, params: TwoQubitParams) -> Operator:
    """Full lab-frame Hamiltonian H0 + H_int with the coupling evaluated at t"""
    return build_h0(params.omegas) + build_hint_lab(params.coupling.value(t))


def build_hrot(t: float, params: TwoQubitParams) -> Operator:
    """
    Rotating-frame interaction at time t.

    g(t) [s1+ s2- e^{i(w1-w2)t} + s1- s2+ e^{-i(w1-w2)t}
          + s1+ s2+ e^{i(w1+w2)t} + s1- s2- e^{-i(w1+w2)t}]
    """
    plus, minus = pauli(PauliKind.PLUS), pauli(PauliKind.MINUS)
    p1, p2 = embed(plus, 1, 2), embed(plus, 2, 2)
    m2 = embed(minus, 2, 2)
    slow = np.exp(1j * (params.omega1 - params.omega2) * t)
    fast = np.exp(1j * (params.omega1 + params.omega2) * t)
    exchange = (p1 @ m2) * slow
    pair = (p1 @ p2) * fast
    return params.coupling.value(t) * (exchange + exchange.conj().T + pair + pair.conj().T)


def rotating_frame_callback(params: TwoQubitParams) -> Callable[[float], Operator]:
    """H(t) closure over the rotating-frame interaction (no mutable state)"""
    plus, minus = pauli(PauliKind.PLUS), pauli(PauliKind.MINUS)
    exchange = embed(plus, 1, 2) @ embed(minus, 2, 2)
    pair = embed(plus, 1, 2) @ embed(plus, 2, 2)
    detuning = params.omega1 - params.omega2
    carrier = params.omega1 + params.omega2

    def hamiltonian(t: float) -> Operator:
        slow = exchange * np.exp(1j * detuning * t)
        fast = pair * np.exp(1j * carrier * t)
        return params.coupling.value(t) * (slow + slow.conj().T + fast + fast.conj().T)
    return hamiltonian


def lab_frame_callback(params: TwoQubitParams) -> Callable[[float], Operator]:
    """H(t) closure over the full lab-frame Hamiltonian"""
    h0 = build_h0(params.omegas)
    unit_interaction = build_hint_lab(1.0)

    def hamiltonian(t: float) -> Operator:
        return h0 + params.coupling.value(t) * unit_interaction
    return hamiltonian


def build_rwa_two(params: TwoQubitParams, g_value: float) -> Operator:
    """Two-qubit RWA Hamiltonian H0 + g (s1+ s2- + s1- s2+)"""
    return build_h0(params.omegas) + g_value * _flip_flop(1, 2, 2)


def build_three(params: ThreeQubitParams, g_values: Sequence[float]) -> Operator:
    """
    Three-qubit exchange Hamiltonian.

    Args:
        params: frequencies (couplings inside params are ignored here)
        g_values: (g12, g23, g13), each >= 0

    Returns:
        H0 + g12 (1<->2) + g23 (2<->3) + g13 (1<->3)
    """
    g_values = tuple(float(g) for g in g_values)
    if len(g_values) != 3:
        raise ValueError(f"build_three needs (g12, g23, g13), got {len(g_values)} values")
    if min(g_values) < 0:
        raise ValueError(f"couplings must be >= 0, got {g_values}")
    g12, g23, g13 = g_values
    return (
        build_h0(params.omegas)
        + g12 * _flip_flop(1, 2, 3)
        + g23 * _flip_flop(2, 3, 3)
        + g13 * _flip_flop(1, 3, 3)
    )
