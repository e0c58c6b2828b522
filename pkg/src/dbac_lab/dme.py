"""Density-matrix exponentiation: partial-swap channel, closed form, and Trotterization.

Conventions fixed here and used package-wide:

* U_DME(t) = exp(-i t SWAP); the channel conjugates an instruction (x) data
  pair by it and traces out the instruction (first register).
* One step with angle delta sends sigma to
  cos^2(delta) sigma + i cos(delta) sin(delta) [sigma, rho] + sin^2(delta) rho,
  which approximates exp(-i delta rho) sigma exp(+i delta rho) to first order.
* M-step Trotterization consumes a fresh instruction copy per step and carries
  error O(t^2 / M) in trace distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qmath
from .errors import ContractViolationError, DimensionMismatchError
from .states import DensityMatrix, PureState


@dataclass(frozen=True)
class DmeParams:
    """Total conjugation duration t split into m partial-swap steps."""

    t: float
    m: int = 1

    def __post_init__(self):
        if not np.isfinite(self.t):
            raise ContractViolationError("t must be finite")
        if int(self.m) < 1:
            raise ContractViolationError("m must be a positive integer")
        object.__setattr__(self, "m", int(self.m))

    @property
    def delta(self) -> float:
        return self.t / self.m


def reflector(psi: PureState, t: float) -> np.ndarray:
    """exp(i t |psi><psi|) = I + (e^{it} - 1)|psi><psi|; Grover reflection at t = pi."""
    if not np.isfinite(t):
        raise ContractViolationError("t must be finite")
    v = psi.amplitudes
    return np.eye(v.size, dtype=complex) + (np.exp(1j * t) - 1.0) * np.outer(v, v.conj())


def _pair(rho, sigma) -> tuple[np.ndarray, np.ndarray]:
    r = rho.matrix if isinstance(rho, DensityMatrix) else qmath.as_complex_matrix(rho)
    s = sigma.matrix if isinstance(sigma, DensityMatrix) else qmath.as_complex_matrix(sigma)
    if r.shape != s.shape:
        raise DimensionMismatchError("instruction and data registers differ in dimension")
    return r, s


def dme_step_exact(rho, sigma, delta: float) -> DensityMatrix:
    """Tr_instr[ U (rho (x) sigma) U^dag ] with U = exp(-i delta SWAP)."""
    r, s = _pair(rho, sigma)
    d = r.shape[0]
    u = qmath.herm_expm(qmath.swap_operator(d), -1j * delta)
    joint = u @ np.kron(r, s) @ u.conj().T
    part = qmath.QubitPartition(dims=(d, d), keep=(1,))
    return DensityMatrix(qmath.partial_trace(joint, part))


def dme_step_closed_form(rho, sigma, delta: float) -> DensityMatrix:
    """Closed form of the one-step channel; agrees with dme_step_exact entrywise."""
    r, s = _pair(rho, sigma)
    c, sn = np.cos(delta), np.sin(delta)
    out = c * c * s + 1j * c * sn * (s @ r - r @ s) + sn * sn * r
    return DensityMatrix(out)


def dme_step_instruction_marginal(rho, sigma, delta: float) -> DensityMatrix:
    """State left on the instruction register after one partial-swap interaction."""
    r, s = _pair(rho, sigma)
    d = r.shape[0]
    u = qmath.herm_expm(qmath.swap_operator(d), -1j * delta)
    joint = u @ np.kron(r, s) @ u.conj().T
    part = qmath.QubitPartition(dims=(d, d), keep=(0,))
    return DensityMatrix(qmath.partial_trace(joint, part))


def dme_trotter(rho, sigma, params: DmeParams) -> DensityMatrix:
    """Apply m partial-swap steps of angle t/m, each with a fresh copy of rho."""
    r, s = _pair(rho, sigma)
    out = s
    for _ in range(params.m):
        out = dme_step_exact(r, out, params.delta).matrix
    return DensityMatrix(out)


def exact_conjugation(rho, sigma, t: float) -> np.ndarray:
    """exp(-i t rho) sigma exp(+i t rho), the channel's M -> infinity limit."""
    r, s = _pair(rho, sigma)
    u = qmath.herm_expm(r, -1j * t)
    return u @ s @ u.conj().T


def dme_error(rho, sigma, params: DmeParams) -> float:
    """Trace distance between the Trotterized channel output and the exact conjugation."""
    approx = dme_trotter(rho, sigma, params).matrix
    ideal = exact_conjugation(rho, sigma, params.t)
    return qmath.trace_distance(approx, ideal)
