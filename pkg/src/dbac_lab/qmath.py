"""Dense complex linear algebra for small qubit registers (up to 5 qubits).

Everything here is a pure function on numpy arrays with complex128 entries.
Operators are dense matrices whose dimension is a power of two; qubit 0 is the
leftmost (most significant) tensor factor throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ContractViolationError, DimensionMismatchError

HERMITICITY_TOL = 1e-12
UNITARITY_TOL = 1e-9

# Single-qubit constants used all over the package.
I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS_1Q = {"I": I2, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}


def as_complex_matrix(m) -> np.ndarray:
    """Coerce to a finite complex128 2-D array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ContractViolationError(f"expected a matrix, got ndim={a.ndim}")
    if not np.all(np.isfinite(a.view(float))):
        raise ContractViolationError("matrix contains NaN or Inf entries")
    return a


def check_square_power_of_two(a: np.ndarray) -> int:
    """Return the qubit count n for a 2^n x 2^n matrix, rejecting other shapes."""
    rows, cols = a.shape
    if rows != cols or rows & (rows - 1) or rows == 0:
        raise DimensionMismatchError(f"operator shape {a.shape} is not square power-of-two")
    return rows.bit_length() - 1


def kron(a, b) -> np.ndarray:
    """Kronecker product a (x) b."""
    return np.kron(as_complex_matrix(a), as_complex_matrix(b))


def kron_all(mats: Iterable) -> np.ndarray:
    """Kronecker product of a sequence of matrices, left factor most significant."""
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, as_complex_matrix(m))
    return out


@dataclass(frozen=True)
class QubitPartition:
    """Subsystem layout for a partial trace: `dims` per factor, `keep` retained indices."""

    dims: tuple[int, ...]
    keep: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "keep", tuple(sorted(int(k) for k in self.keep)))
        if any(d < 2 for d in self.dims):
            raise ContractViolationError("subsystem dimensions must be >= 2")
        if len(set(self.keep)) != len(self.keep):
            raise ContractViolationError("keep indices must be distinct")
        if not self.keep:
            raise ContractViolationError("keep must be nonempty")
        if any(k < 0 or k >= len(self.dims) for k in self.keep):
            raise ContractViolationError("keep index out of range")
        if len(self.keep) == len(self.dims):
            raise ContractViolationError("keep must be a strict subset when tracing")

    @classmethod
    def qubits(cls, n: int, keep: Sequence[int]) -> "QubitPartition":
        return cls(dims=(2,) * n, keep=tuple(keep))


def partial_trace(m, part: QubitPartition) -> np.ndarray:
    """Trace out the subsystems of `m` not listed in `part.keep`.

    Preserves the total trace and the relative order of kept subsystems.
    """
    a = as_complex_matrix(m)
    dims = part.dims
    total = int(np.prod(dims))
    if a.shape != (total, total):
        raise DimensionMismatchError(f"matrix shape {a.shape} does not match dims {dims}")
    nsub = len(dims)
    keep = list(part.keep)
    tensor = a.reshape(dims + dims)
    # contract traced-out row/col index pairs, highest axis first
    traced = sorted(set(range(nsub)) - set(keep), reverse=True)
    for q in traced:
        tensor = np.trace(tensor, axis1=q, axis2=q + (tensor.ndim // 2))
    d_keep = int(np.prod([dims[k] for k in keep]))
    return np.ascontiguousarray(tensor.reshape(d_keep, d_keep))


def check_hermitian(h, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Validate Hermiticity entrywise within tol, returning the symmetrized matrix.

    Inputs beyond tolerance are rejected rather than silently symmetrized.
    """
    a = as_complex_matrix(h)
    check_square_power_of_two(a)
    dev = np.abs(a - a.conj().T).max()
    if dev > tol:
        raise ContractViolationError(f"matrix is not Hermitian (max deviation {dev:.3e} > {tol:.0e})")
    return 0.5 * (a + a.conj().T)


def herm_expm(h, scale: complex) -> np.ndarray:
    """exp(scale * h) of a Hermitian matrix via eigendecomposition."""
    a = check_hermitian(h)
    if not np.isfinite(complex(scale).real) or not np.isfinite(complex(scale).imag):
        raise ContractViolationError("scale must be finite")
    w, v = np.linalg.eigh(a)
    return (v * np.exp(complex(scale) * w)) @ v.conj().T


def is_unitary(u, tol: float = UNITARITY_TOL) -> bool:
    a = as_complex_matrix(u)
    if a.shape[0] != a.shape[1]:
        return False
    return bool(np.abs(a.conj().T @ a - np.eye(a.shape[0])).max() <= tol)


def check_unitary(u, tol: float = UNITARITY_TOL) -> np.ndarray:
    a = as_complex_matrix(u)
    if not is_unitary(a, tol):
        raise ContractViolationError("matrix is not unitary within tolerance")
    return a


def dist_up_to_global_phase(u, v) -> float:
    """Frobenius distance between unitaries minimized over a global phase.

    The minimizing phase comes from the closed form e^{i*gamma} = conj(T)/|T|
    with T = Tr[u^dag v]; the distance equals sqrt(2d - 2|T|) but is evaluated
    as the norm of the phase-aligned difference, which stays accurate near zero.
    Zero iff u and v agree up to a global phase.
    """
    a = check_unitary(u)
    b = check_unitary(v)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch {a.shape} vs {b.shape}")
    t = np.trace(a.conj().T @ b)
    if abs(t) < 1e-300:
        # cross term vanishes for every phase; any alignment gives the same norm
        return float(np.linalg.norm(a - b))
    phase = np.conj(t) / abs(t)
    return float(np.linalg.norm(a - phase * b))


def trace_distance(a, b) -> float:
    """Half the nuclear norm of (a - b) for Hermitian a, b."""
    d = as_complex_matrix(a) - as_complex_matrix(b)
    dev = np.abs(d - d.conj().T).max()
    if dev > 1e-10:
        raise ContractViolationError("trace_distance expects Hermitian operands")
    return float(0.5 * np.abs(np.linalg.eigvalsh(0.5 * (d + d.conj().T))).sum())


def frobenius_distance(a, b) -> float:
    """Frobenius-norm distance, exposed for diagnostics only."""
    return float(np.linalg.norm(as_complex_matrix(a) - as_complex_matrix(b)))


def swap_operator(d: int = 2) -> np.ndarray:
    """SWAP on two d-dimensional registers: SWAP |v,w> = |w,v>."""
    s = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1.0
    return s


def embed_gate(gate, qubits: Sequence[int], n: int) -> np.ndarray:
    """Embed `gate` acting on ordered `qubits` into the n-qubit register.

    Qubit 0 is the most significant bit of the computational index.
    """
    g = as_complex_matrix(gate)
    k = len(qubits)
    if g.shape != (2**k, 2**k):
        raise DimensionMismatchError("gate dimension does not match qubit count")
    if len(set(qubits)) != k or any(q < 0 or q >= n for q in qubits):
        raise ContractViolationError("qubit indices must be distinct and in range")
    tensor = g.reshape((2,) * (2 * k))
    full = np.eye(2**n, dtype=complex).reshape((2,) * (2 * n))
    # contract gate output legs onto the register axes for the addressed qubits
    in_axes = tuple(k + i for i in range(k))
    full = np.tensordot(tensor, full, axes=(in_axes, tuple(qubits)))
    # tensordot moved gate output legs to the front; restore register order
    order = []
    pos = {q: i for i, q in enumerate(qubits)}
    free = iter(range(k, k + 2 * n - k))
    for axis in range(n):
        order.append(pos[axis] if axis in pos else next(free))
    order += list(range(len(order), 2 * n))
    full = full.transpose(order)
    return np.ascontiguousarray(full.reshape(2**n, 2**n))
