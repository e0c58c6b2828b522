"""Reference cooling protocols: a 3-qubit compression round with bath reset,
and probabilistic two-copy mixedness reduction.

The compression circuit swaps the register into the reset line, then applies a
controlled bit-flip pair, a doubly-controlled flip back onto the target, and
the controlled pair again.  For product thermal inputs with polarizations
(e1, e2, e3) the target polarization becomes (e1 + e2 + e3 - e1 e2 e3)/2,
a 3/2 boost at small equal polarization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qmath
from .errors import ContractViolationError, DimensionMismatchError
from .states import DensityMatrix, PureState


@dataclass(frozen=True)
class PolarizedQubit:
    """Diagonal single-qubit state (1/2) diag(1 + eps, 1 - eps)."""

    eps: float

    def __post_init__(self):
        if abs(self.eps) > 1.0:
            raise ContractViolationError("polarization must lie in [-1, 1]")

    def density(self) -> DensityMatrix:
        return thermal_qubit(self.eps)


@dataclass(frozen=True)
class MixednessState:
    """rho = (1 - x) |psi><psi| + x I/2 with mixedness parameter x in [0, 1)."""

    x: float
    psi: PureState

    def __post_init__(self):
        if not 0.0 <= self.x < 1.0:
            raise ContractViolationError("mixedness must lie in [0, 1)")
        if self.psi.num_qubits != 1:
            raise DimensionMismatchError("mixedness states are single-qubit here")

    def density(self) -> DensityMatrix:
        proj = np.outer(self.psi.amplitudes, self.psi.amplitudes.conj())
        return DensityMatrix((1.0 - self.x) * proj + 0.5 * self.x * qmath.I2)


def thermal_qubit(eps: float) -> DensityMatrix:
    """(1/2) diag(1 + eps, 1 - eps)."""
    if abs(eps) > 1.0:
        raise ContractViolationError("polarization must lie in [-1, 1]")
    return DensityMatrix(0.5 * np.diag([1.0 + eps, 1.0 - eps]).astype(complex))


def _controlled_flip_pair() -> np.ndarray:
    """X on qubits 1 and 2 controlled on qubit 0."""
    u = np.eye(8, dtype=complex)
    for idx in range(8):
        if idx & 0b100:
            u[idx, idx] = 0.0
            u[idx ^ 0b011, idx] = 1.0
    return u


def _double_controlled_flip() -> np.ndarray:
    """X on qubit 0 controlled on qubits 1 and 2."""
    u = np.eye(8, dtype=complex)
    for idx in range(8):
        if idx & 0b011 == 0b011:
            u[idx, idx] = 0.0
            u[idx ^ 0b100, idx] = 1.0
    return u


def ppa_compression_unitary() -> np.ndarray:
    """The full 3-qubit round: two swaps into the reset line, then the
    flip-pair / double-flip / flip-pair compression block."""
    swap = qmath.swap_operator(2)
    sw02 = qmath.embed_gate(swap, (0, 2), 3)
    sw12 = qmath.embed_gate(swap, (1, 2), 3)
    cff = _controlled_flip_pair()
    return cff @ _double_controlled_flip() @ cff @ sw12 @ sw02


_U_PPA = ppa_compression_unitary()


def ppa_round(rho3: DensityMatrix) -> DensityMatrix:
    """Conjugate a 3-qubit register by the compression round (qubit 0 = target,
    qubit 2 = reset line)."""
    if rho3.matrix.shape != (8, 8):
        raise DimensionMismatchError("ppa_round expects a 3-qubit register")
    return DensityMatrix(_U_PPA @ rho3.matrix @ _U_PPA.conj().T)


def target_polarization(rho3: DensityMatrix) -> float:
    """Tr[(Z x I x I) rho] on the target line."""
    zii = qmath.kron_all([qmath.PAULI_Z, qmath.I2, qmath.I2])
    return float(np.trace(zii @ rho3.matrix).real)


def hbac_step(eps_reg: list[PolarizedQubit], eps_bath: float) -> list[PolarizedQubit]:
    """One bath-coupled round: compress, keep the target marginal, re-thermalize
    the computational qubits to the bath polarization."""
    if len(eps_reg) != 3:
        raise ContractViolationError("the register holds exactly 3 qubits")
    if abs(eps_bath) > 1.0:
        raise ContractViolationError("bath polarization must lie in [-1, 1]")
    rho = DensityMatrix(
        qmath.kron_all([q.density().matrix for q in eps_reg])
    )
    out = ppa_round(rho)
    new_target = target_polarization(out)
    return [PolarizedQubit(new_target), PolarizedQubit(eps_bath), PolarizedQubit(eps_bath)]


def cem_round_closed(x: float) -> dict[str, float]:
    """Post-success mixedness x' = x(2 + x)/(4 - 2x + x^2) and the success
    probability 1 - x/2 + x^2/4."""
    if not 0.0 <= x < 1.0:
        raise ContractViolationError("x must lie in [0, 1)")
    x_next = (2.0 + x) / (4.0 - 2.0 * x + x * x) * x
    p_success = 1.0 - 0.5 * x + 0.25 * x * x
    return {"x_next": x_next, "p_success": p_success}


def cem_round_simulated(rho: DensityMatrix) -> dict[str, object]:
    """Two-copy interference round, brute force.

    Builds ancilla (x) rho (x) rho, applies the Hadamard-conjugated controlled
    swap, postselects the ancilla on |0>, and traces out one copy.  Returns the
    surviving copy and the postselection probability.
    """
    if rho.matrix.shape != (2, 2):
        raise DimensionMismatchError("cem_round_simulated expects a single qubit")
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    i4 = np.eye(4, dtype=complex)
    cswap = np.kron(p0, i4) + np.kron(p1, qmath.swap_operator(2))
    u = np.kron(h, i4) @ cswap @ np.kron(h, i4)
    joint = np.kron(p0, np.kron(rho.matrix, rho.matrix))
    evolved = u @ joint @ u.conj().T
    proj = np.kron(p0, i4)
    kept = proj @ evolved @ proj
    p_success = float(np.trace(kept).real)
    kept = kept / p_success
    reduced = qmath.partial_trace(kept, qmath.QubitPartition((2, 2, 2), keep=(2,)))
    return {"rho_next": DensityMatrix(reduced), "p_success": p_success}


def mixedness_of(rho: DensityMatrix) -> float:
    """x = 2 * (smaller eigenvalue) for a single-qubit state."""
    w = np.linalg.eigvalsh(rho.matrix)
    return float(2.0 * w.min())
