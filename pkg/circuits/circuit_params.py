"""
Conversion of physical transmon circuit values to dimensionless model parameters.

Energies are scaled by hbar * omega_c; the reference frequency omega_c is
part of the input so the same circuit can be expressed on any time scale.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import constants

logger = logging.getLogger(__name__)

PAIRS = ((1, 2), (2, 3), (1, 3))

# Superconducting flux quantum h / 2e
FLUX_QUANTUM = constants.h / (2 * constants.e)


def charging_energy(capacitance: float) -> float:
    """E_C = e^2 / 2C in joules"""
    if capacitance <= 0:
        raise ValueError(f"capacitance must be > 0, got {capacitance}")
    return constants.e ** 2 / (2 * capacitance)


def josephson_energy(inductance: float) -> float:
    """E_J = (Phi_0 / 2 pi)^2 / L in joules"""
    if inductance <= 0:
        raise ValueError(f"inductance must be > 0, got {inductance}")
    return (FLUX_QUANTUM / (2 * np.pi)) ** 2 / inductance


def coupling_strength(c_ij: float, c_i: float, c_j: float, omega_i: float, omega_j: float) -> float:
    """g_ij = C_ij sqrt(omega_i omega_j) / (2 sqrt(C_i C_j))"""
    if c_i <= 0 or c_j <= 0:
        raise ValueError(f"qubit capacitances must be > 0, got ({c_i}, {c_j})")
    if c_ij < 0:
        raise ValueError(f"coupling capacitance must be >= 0, got {c_ij}")
    return c_ij * np.sqrt(omega_i * omega_j) / (2 * np.sqrt(c_i * c_j))


@dataclass(frozen=True)
class PhysicalCircuitParams:
    """
    SI description of two or three capacitively coupled transmons.

    Attributes:
        qubit_capacitances: C_i in farads, one per qubit
        coupling_capacitances: C_ij in farads keyed by (i, j), 1-based
        josephson_inductances: L_i in henries, one per qubit
        reference_frequency: omega_c in rad/s
    """
    qubit_capacitances: Tuple[float, ...]
    coupling_capacitances: Dict[Tuple[int, int], float]
    josephson_inductances: Tuple[float, ...]
    reference_frequency: float

    def __post_init__(self):
        n = len(self.qubit_capacitances)
        if n not in (2, 3):
            raise ValueError(f"2 or 3 qubits are supported, got {n}")
        if len(self.josephson_inductances) != n:
            raise ValueError(
                f"need {n} Josephson inductances, got {len(self.josephson_inductances)}"
            )
        if min(self.qubit_capacitances) <= 0 or min(self.josephson_inductances) <= 0:
            raise ValueError("capacitances and inductances must be > 0")
        if self.reference_frequency <= 0:
            raise ValueError(f"reference_frequency must be > 0, got {self.reference_frequency}")
        for (i, j), value in self.coupling_capacitances.items():
            if not (1 <= i <= n and 1 <= j <= n and i != j):
                raise ValueError(f"invalid coupling pair ({i}, {j}) for {n} qubits")
            if value < 0:
                raise ValueError(f"coupling capacitance C{i}{j} must be >= 0, got {value}")

    @property
    def qubit_count(self) -> int:
        return len(self.qubit_capacitances)


@dataclass(frozen=True)
class DimensionlessCircuit:
    omegas: Tuple[float, ...]
    couplings: Dict[Tuple[int, int], float] = field(default_factory=dict)


def couplings_from_frequencies(
    omegas: Sequence[float],
    qubit_capacitances: Sequence[float],
    coupling_capacitances: Dict[Tuple[int, int], float],
) -> Dict[Tuple[int, int], float]:
    """
    Dimensionless couplings from known dimensionless qubit frequencies.

    Args:
        omegas: dimensionless frequencies, one per qubit
        qubit_capacitances: C_i, any consistent unit
        coupling_capacitances: C_ij keyed by 1-based (i, j), same unit as C_i

    Returns:
        Dict (i, j) -> g_ij; missing pairs are 0
    """
    n = len(omegas)
    if len(qubit_capacitances) != n:
        raise ValueError(f"need {n} qubit capacitances, got {len(qubit_capacitances)}")
    result = {}
    for i, j in PAIRS:
        if j > n:
            continue
        c_ij = coupling_capacitances.get((i, j), coupling_capacitances.get((j, i), 0.0))
        result[(i, j)] = float(coupling_strength(
            c_ij, qubit_capacitances[i - 1], qubit_capacitances[j - 1], omegas[i - 1], omegas[j - 1]
        ))
    return result


def dimensionless_from_circuit(p: PhysicalCircuitParams) -> DimensionlessCircuit:
    """
    omega_i = (sqrt(8 E_Ci E_Ji) - E_Ci) / (hbar omega_c) and the g_ij that follow.
    """
    scale = constants.hbar * p.reference_frequency
    omegas = []
    for c_i, l_i in zip(p.qubit_capacitances, p.josephson_inductances):
        e_c = charging_energy(c_i)
        e_j = josephson_energy(l_i)
        omega = (np.sqrt(8 * e_c * e_j) - e_c) / scale
        if omega <= 0:
            raise ValueError(
                f"circuit is outside the transmon regime (E_J/E_C = {e_j / e_c:.3g}), "
                f"qubit frequency would be {omega:.3g}"
            )
        omegas.append(float(omega))
    couplings = couplings_from_frequencies(omegas, p.qubit_capacitances, p.coupling_capacitances)
    logger.debug("Circuit converted: omegas=%s couplings=%s", omegas, couplings)
    return DimensionlessCircuit(omegas=tuple(omegas), couplings=couplings)


def reference_circuit(reference_frequency_ghz: Optional[float] = None) -> DimensionlessCircuit:
    """
    Tunable-coupler reference device: omega_1 = omega_3 = 4 GHz, omega_2 = 4.5 GHz,
    C_i = 100 fF, C12 = C23 = 1 fF, C13 = 0.02 fF.

    Args:
        reference_frequency_ghz: omega_c in GHz; defaults to 1 GHz so frequencies read in GHz

    Returns:
        Dimensionless frequencies and couplings
    """
    omega_c = 1.0 if reference_frequency_ghz is None else float(reference_frequency_ghz)
    if omega_c <= 0:
        raise ValueError(f"reference frequency must be > 0, got {omega_c}")
    omegas = (4.0 / omega_c, 4.5 / omega_c, 4.0 / omega_c)
    femto = constants.femto
    capacitances = (100 * femto, 100 * femto, 100 * femto)
    coupling_caps = {(1, 2): 1 * femto, (2, 3): 1 * femto, (1, 3): 0.02 * femto}
    return DimensionlessCircuit(
        omegas=omegas,
        couplings=couplings_from_frequencies(omegas, capacitances, coupling_caps),
    )
