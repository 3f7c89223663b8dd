"""
Qubit operator algebra

Dense operators over n-qubit Hilbert spaces (dimension 2**n, n <= 3 in
practice) with one fixed basis convention:

- qubit 1 is the most significant bit of a basis index
- the ground state |0> is the first basis vector, the excited state |1> the second
- sigma^z has eigenvalue -1 on |0> and +1 on |1>

Under this convention the 1-based diagonal labels rho_11 ... rho_44 (and
rho_11 ... rho_88 for three qubits) map to 0-based indices k - 1.
"""

from enum import Enum
from functools import reduce
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

Operator = np.ndarray
DensityMatrix = np.ndarray
BasisLabel = Union[str, Sequence[int]]

# Basis states carrying the W superposition, in index order
W_COMPONENTS = ('011', '101', '110')


class PauliKind(Enum):
    """Single-qubit operators of the catalog"""
    X = 'X'
    Y = 'Y'
    Z = 'Z'
    PLUS = 'Plus'
    MINUS = 'Minus'


_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)   # |1><0|
_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|

_PAULI = {
    PauliKind.PLUS: _PLUS,
    PauliKind.MINUS: _MINUS,
    PauliKind.X: _PLUS + _MINUS,
    PauliKind.Y: -1j * _PLUS + 1j * _MINUS,
    PauliKind.Z: np.diag([-1.0, 1.0]).astype(complex),
}


def pauli(kind: Union[PauliKind, str]) -> Operator:
    """
    Return a fresh 2x2 copy of a single-qubit operator.

    Args:
        kind: PauliKind member or its value ('X', 'Y', 'Z', 'Plus', 'Minus')

    Returns:
        Complex 2x2 matrix
    """
    return _PAULI[PauliKind(kind)].copy()


def qubit_count(dim: int) -> int:
    """Number of qubits n for a Hilbert-space dimension 2**n"""
    n = int(round(np.log2(dim))) if dim > 0 else 0
    if n < 1 or 2 ** n != dim:
        raise ValueError(f"dimension {dim} is not a power of two >= 2")
    return n


def embed(op: Operator, site: int, n: int) -> Operator:
    """
    Place a single-qubit operator on qubit `site` of an n-qubit register.

    Args:
        op: 2x2 operator
        site: 1-based qubit index (1 = most significant)
        n: number of qubits

    Returns:
        I x ... x op x ... x I, shape (2**n, 2**n)
    """
    op = np.asarray(op, dtype=complex)
    if op.shape != (2, 2):
        raise ValueError(f"embed expects a 2x2 operator, got shape {op.shape}")
    if not 1 <= site <= n:
        raise ValueError(f"site {site} out of range for {n} qubits")
    factors = [op if j == site else np.eye(2, dtype=complex) for j in range(1, n + 1)]
    return reduce(np.kron, factors)


def basis_index(bits: BasisLabel) -> int:
    """0-based index of a basis label such as '101' or (1, 0, 1)"""
    digits = _parse_bits(bits)
    return int(''.join(str(b) for b in digits), 2)


def basis_label(index: int, n: int) -> str:
    """Basis label string for a 0-based index, e.g. (5, 3) -> '101'"""
    if not 0 <= index < 2 ** n:
        raise ValueError(f"index {index} out of range for {n} qubits")
    return format(index, f'0{n}b')


def _parse_bits(bits: BasisLabel) -> Tuple[int, ...]:
    if isinstance(bits, str):
        if not bits or any(c not in '01' for c in bits):
            raise ValueError(f"invalid basis label {bits!r}")
        return tuple(int(c) for c in bits)
    digits = tuple(int(b) for b in bits)
    if not digits or any(b not in (0, 1) for b in digits):
        raise ValueError(f"invalid basis label {bits!r}")
    return digits


def pure_state(amplitudes: Iterable[complex]) -> DensityMatrix:
    """Projector |psi><psi| of a (normalized here) state vector"""
    psi = np.asarray(list(amplitudes), dtype=complex)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("state vector has zero norm")
    psi = psi / norm
    return np.outer(psi, psi.conj())


def basis_state(bits: BasisLabel) -> DensityMatrix:
    """Pure projector |bits><bits|"""
    digits = _parse_bits(bits)
    dim = 2 ** len(digits)
    rho = np.zeros((dim, dim), dtype=complex)
    idx = basis_index(digits)
    rho[idx, idx] = 1.0
    return rho


def w_state(n: int = 3) -> DensityMatrix:
    """Projector onto |W> = (|011> + |101> + |110>)/sqrt(3)"""
    if n != 3:
        raise ValueError(f"w_state is defined for 3 qubits, got n={n}")
    rho = np.zeros((8, 8), dtype=complex)
    support = [basis_index(label) for label in W_COMPONENTS]
    rho[np.ix_(support, support)] = 1.0 / 3.0
    return rho


def maximally_mixed(n: int) -> DensityMatrix:
    dim = 2 ** n
    return np.eye(dim, dtype=complex) / dim


def excitation_operator(n: int) -> Operator:
    """Total excitation number N = sum_j (sigma_j^z + I)/2"""
    dim = 2 ** n
    identity = np.eye(dim, dtype=complex)
    return sum((embed(pauli(PauliKind.Z), j, n) + identity) / 2 for j in range(1, n + 1))


def dagger(op: Operator) -> Operator:
    return np.conjugate(np.transpose(op))


def hermiticity_error(op: Operator) -> float:
    """max |A - A^dagger| over entries (works on stacks of matrices)"""
    op = np.asarray(op)
    return float(np.max(np.abs(op - np.conjugate(np.swapaxes(op, -1, -2)))))


def check_density_matrix(
    rho: DensityMatrix,
    hermiticity_tol: float = 1e-12,
    trace_tol: float = 1e-10,
    positivity_tol: float = 1e-9,
) -> dict:
    """
    Validate the DensityMatrix invariants.

    Args:
        rho: square complex matrix
        hermiticity_tol: allowed max |rho - rho^dagger|
        trace_tol: allowed |trace(rho) - 1|
        positivity_tol: allowed magnitude of a negative eigenvalue

    Returns:
        Dict with the measured 'hermiticity', 'trace_drift', 'min_eigenvalue'

    Raises:
        ValueError: if any invariant fails; the message names every failure
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise ValueError("density matrix has non-finite entries")
    qubit_count(rho.shape[0])

    report = {
        'hermiticity': hermiticity_error(rho),
        'trace_drift': float(abs(np.trace(rho) - 1.0)),
        'min_eigenvalue': float(np.min(np.linalg.eigvalsh((rho + dagger(rho)) / 2))),
    }
    failures = []
    if report['hermiticity'] > hermiticity_tol:
        failures.append(f"hermiticity {report['hermiticity']:.3e} > {hermiticity_tol:.1e}")
    if report['trace_drift'] > trace_tol:
        failures.append(f"trace drift {report['trace_drift']:.3e} > {trace_tol:.1e}")
    if report['min_eigenvalue'] < -positivity_tol:
        failures.append(f"min eigenvalue {report['min_eigenvalue']:.3e} < -{positivity_tol:.1e}")
    if failures:
        raise ValueError('invalid density matrix: ' + '; '.join(failures))
    return report
