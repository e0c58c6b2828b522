"""Gate-level circuit representation, native-ZZ compilation, and the cooling
circuit layouts.

Native gate set: RZZ, RX, RY, RZ, H, S, SDG (plus a semantic-only BARRIER).
Single-qubit rotations use the half-angle convention R_P(theta) = exp(-i theta
P/2); the two-qubit interaction is the diagonal

    RZZ(phi) = diag(e^{-i phi/2}, e^{i phi/2}, e^{i phi/2}, e^{-i phi/2}),

exactly exp(-i phi Z(x)Z / 2).  The partial-swap compilation sandwiches three
RZZ blocks in X/Y basis changes, yielding exp(-i phi (XX+YY+ZZ)/2), which is
exp(-i phi SWAP) up to a global phase with no Trotter error (the three terms
commute).

Angle bookkeeping for the cooling layouts: plain-rotation tables written in the
no-half-angle convention R_Z(a) = exp(-i a Z) translate to RZ(2a) here, and the
echo rotations carry the sign that makes the compiled circuits cool (verified
against the density-matrix simulator; the data qubit of each layout is recorded
in DBAC_TARGET_QUBIT).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import qmath
from .errors import ContractViolationError, SingularParameterError

GATE_KINDS = ("RX", "RY", "RZ", "H", "S", "SDG", "RZZ", "BARRIER")
_ARITY = {  # (num params, num qubits)
    "RX": (1, 1),
    "RY": (1, 1),
    "RZ": (1, 1),
    "H": (0, 1),
    "S": (0, 1),
    "SDG": (0, 1),
    "RZZ": (1, 2),
    "BARRIER": (0, 0),
}

# data (cooled) wire of each cooling layout
DBAC_TARGET_QUBIT = {"A": 0, "B": 1, "C": 1}
DBAC_NUM_QUBITS = {"A": 2, "B": 3, "C": 4}


@dataclass(frozen=True)
class Gate:
    kind: str
    params: tuple[float, ...] = ()
    qubits: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ContractViolationError(f"unknown gate kind {self.kind!r}")
        nparam, nqubit = _ARITY[self.kind]
        params = tuple(float(p) for p in self.params)
        qubits = tuple(int(q) for q in self.qubits)
        if len(params) != nparam or (self.kind != "BARRIER" and len(qubits) != nqubit):
            raise ContractViolationError(f"{self.kind} expects {nparam} param(s), {nqubit} qubit(s)")
        if len(set(qubits)) != len(qubits):
            raise ContractViolationError("gate qubits must be distinct")
        if not all(np.isfinite(p) for p in params):
            raise ContractViolationError("gate angles must be finite")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "qubits", qubits)


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...]
    label: str = ""

    def __post_init__(self):
        if not 1 <= self.num_qubits <= 5:
            raise ContractViolationError("circuits support 1..5 qubits")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(q >= self.num_qubits for q in g.qubits):
                raise ContractViolationError(f"gate {g.kind} addresses qubit out of range")


def _rx(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _ry(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(theta):
    return np.diag(np.exp([-1j * theta / 2, 1j * theta / 2]))


def rzz_matrix(phi: float) -> np.ndarray:
    return np.diag(np.exp(-0.5j * phi * np.array([1.0, -1.0, -1.0, 1.0])))


_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_S = np.diag([1.0, 1j]).astype(complex)
_SDG = np.diag([1.0, -1j]).astype(complex)


def gate_matrix(g: Gate) -> np.ndarray:
    if g.kind == "RX":
        return _rx(g.params[0])
    if g.kind == "RY":
        return _ry(g.params[0])
    if g.kind == "RZ":
        return _rz(g.params[0])
    if g.kind == "H":
        return _H
    if g.kind == "S":
        return _S
    if g.kind == "SDG":
        return _SDG
    if g.kind == "RZZ":
        return rzz_matrix(g.params[0])
    raise ContractViolationError(f"gate {g.kind} has no unitary")


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Ordered product of the gate unitaries (barriers contribute nothing)."""
    u = np.eye(2**c.num_qubits, dtype=complex)
    for g in c.gates:
        if g.kind == "BARRIER":
            continue
        u = qmath.embed_gate(gate_matrix(g), g.qubits, c.num_qubits) @ u
    return u


def _udme_native_gates(phi: float, q0: int, q1: int) -> list[Gate]:
    gates = [Gate("RZZ", (phi,), (q0, q1))]
    for q in (q0, q1):
        gates.append(Gate("RX", (np.pi / 2,), (q,)))
    gates.append(Gate("RZZ", (phi,), (q0, q1)))
    for q in (q0, q1):
        gates.append(Gate("RX", (-np.pi / 2,), (q,)))
    for q in (q0, q1):
        gates.append(Gate("RY", (np.pi / 2,), (q,)))
    gates.append(Gate("RZZ", (phi,), (q0, q1)))
    for q in (q0, q1):
        gates.append(Gate("RY", (-np.pi / 2,), (q,)))
    return gates


def compile_udme_native(phi: float) -> Circuit:
    """Partial-swap compilation with RX/RY basis changes around three RZZ blocks."""
    return Circuit(2, tuple(_udme_native_gates(phi, 0, 1)), label=f"udme_native({phi:.6g})")


def compile_udme_hs(phi: float) -> Circuit:
    """Same target unitary via Hadamard / phase-gate basis changes."""
    gates = [Gate("RZZ", (phi,), (0, 1))]
    for q in (0, 1):
        gates.append(Gate("SDG", (), (q,)))
    for q in (0, 1):
        gates.append(Gate("H", (), (q,)))
    gates.append(Gate("RZZ", (phi,), (0, 1)))
    for q in (0, 1):
        gates.append(Gate("H", (), (q,)))
    for q in (0, 1):
        gates.append(Gate("S", (), (q,)))
    for q in (0, 1):
        gates.append(Gate("H", (), (q,)))
    gates.append(Gate("RZZ", (phi,), (0, 1)))
    for q in (0, 1):
        gates.append(Gate("H", (), (q,)))
    return Circuit(2, tuple(gates), label=f"udme_hs({phi:.6g})")


def _cz_gates(q0: int, q1: int) -> list[Gate]:
    # plain-rotation R_Z(pi) from the source table is RZ(2*pi) here: a global
    # sign, kept for a faithful gate sequence
    gates = [Gate("RZZ", (np.pi / 2,), (q0, q1))]
    for q in (q0, q1):
        gates.append(Gate("RZ", (2 * np.pi,), (q,)))
        gates.append(Gate("SDG", (), (q,)))
    return gates


def compile_cz() -> Circuit:
    """CZ from one RZZ(pi/2) plus local corrections."""
    return Circuit(2, tuple(_cz_gates(0, 1)), label="cz")


def _cnot_gates(control: int, target: int) -> list[Gate]:
    return [Gate("H", (), (target,))] + _cz_gates(control, target) + [Gate("H", (), (target,))]


def compile_cnot() -> Circuit:
    """CNOT as H-conjugated CZ (control 0, target 1)."""
    return Circuit(2, tuple(_cnot_gates(0, 1)), label="cnot")


def compile_swap3() -> Circuit:
    """SWAP from three alternating CNOTs."""
    gates = _cnot_gates(0, 1) + _cnot_gates(1, 0) + _cnot_gates(0, 1)
    return Circuit(2, tuple(gates), label="swap3")


def build_circuit(which: str, theta: float, phi: float = np.pi / 4) -> Circuit:
    """Cooling circuit layouts.

    A: one step, one partial swap on 2 qubits (data 0, instruction 1).
    B: one step split into two partial swaps of angle phi each on 3 qubits
       (data 1, instructions 0 and 2); the step duration is 2*phi.
    C: two chained steps of one partial swap each on 4 qubits; the first step
       runs twice in parallel (data wires 1 and 2), the second consumes wire 2
       as instruction and cools wire 1.

    Instruction wires carry the echo rotation RZ(-2t) = exp(+i t Z); the
    closing echo of each step commutes with the energy readout and is omitted.
    """
    if which not in DBAC_TARGET_QUBIT:
        raise ContractViolationError(f"unknown circuit label {which!r}")
    if which == "A":
        t = phi
        gates = [Gate("RX", (theta,), (0,)), Gate("RX", (theta,), (1,)), Gate("BARRIER")]
        gates.append(Gate("RZ", (-2 * t,), (1,)))
        gates += _udme_native_gates(phi, 0, 1)
        return Circuit(2, tuple(gates), label="A")
    if which == "B":
        t = 2 * phi
        gates = [Gate("RX", (theta,), (q,)) for q in range(3)]
        gates.append(Gate("BARRIER"))
        gates.append(Gate("RZ", (-2 * t,), (0,)))
        gates.append(Gate("RZ", (-2 * t,), (2,)))
        gates += _udme_native_gates(phi, 0, 1)
        gates += _udme_native_gates(phi, 1, 2)
        return Circuit(3, tuple(gates), label="B")
    t = phi
    gates = [Gate("RX", (theta,), (q,)) for q in range(4)]
    gates.append(Gate("BARRIER"))
    gates.append(Gate("RZ", (-2 * t,), (0,)))
    gates.append(Gate("RZ", (-2 * t,), (3,)))
    gates += _udme_native_gates(phi, 0, 1)
    gates += _udme_native_gates(phi, 2, 3)
    gates.append(Gate("BARRIER"))
    gates.append(Gate("RZ", (-2 * t,), (2,)))
    gates += _udme_native_gates(phi, 1, 2)
    return Circuit(4, tuple(gates), label="C")


def perturb_rzz(c: Circuit, delta_phi: float) -> Circuit:
    """Shift every RZZ angle by delta_phi, modeling interaction-duration spread."""
    gates = tuple(
        replace(g, params=(g.params[0] + delta_phi,)) if g.kind == "RZZ" else g
        for g in c.gates
    )
    return Circuit(c.num_qubits, gates, label=c.label)


# --- serialization: one gate per line, `KIND [angle] [qubit [qubit]]` ---------


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def serialize_circuit(c: Circuit) -> str:
    lines = [f"CIRCUIT {c.num_qubits} {c.label}".rstrip()]
    for g in c.gates:
        parts = [g.kind] + [_fmt(p) for p in g.params] + [str(q) for q in g.qubits]
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> Circuit:
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines or not lines[0].startswith("CIRCUIT"):
        raise ContractViolationError("circuit text must start with a CIRCUIT header line")
    head = lines[0].split(maxsplit=2)
    num_qubits = int(head[1])
    label = head[2] if len(head) > 2 else ""
    gates = []
    for ln in lines[1:]:
        tokens = ln.split()
        kind = tokens[0]
        if kind not in _ARITY:
            raise ContractViolationError(f"unknown gate kind {kind!r} in line {ln!r}")
        nparam, nqubit = _ARITY[kind]
        if len(tokens) != 1 + nparam + nqubit:
            raise ContractViolationError(f"malformed gate line {ln!r}")
        params = tuple(float(tok) for tok in tokens[1 : 1 + nparam])
        qubits = tuple(int(tok) for tok in tokens[1 + nparam :])
        gates.append(Gate(kind, params, qubits))
    return Circuit(num_qubits, tuple(gates), label=label)


# --- Stark-drive interaction-rate model ---------------------------------------


@dataclass(frozen=True)
class SizzleParams:
    """Drive and coupling parameters of the Stark-boosted ZZ rate."""

    j: float
    alpha0: float
    alpha1: float
    omega0: float
    omega1: float
    delta0d: float
    delta1d: float
    phi0: float
    phi1: float
    delta_ij: float

    def __post_init__(self):
        denoms = {
            "delta0d": self.delta0d,
            "delta1d": self.delta1d,
            "delta0d+alpha0": self.delta0d + self.alpha0,
            "delta1d+alpha1": self.delta1d + self.alpha1,
            "delta_ij+alpha0": self.delta_ij + self.alpha0,
            "alpha1-delta_ij": self.alpha1 - self.delta_ij,
        }
        for name, value in denoms.items():
            if value == 0:
                raise SingularParameterError(f"denominator {name} vanishes")


def sizzle_zz_rate(p: SizzleParams) -> float:
    """Static ZZ rate plus the drive-induced contribution.

    The drive term is proportional to cos(phi0 - phi1), so it can boost or
    cancel the static rate depending on the relative drive phase.
    """
    static = -2.0 * p.j**2 * (p.alpha0 + p.alpha1) / ((p.delta_ij + p.alpha0) * (p.alpha1 - p.delta_ij))
    drive = (
        2.0
        * p.j
        * p.alpha0
        * p.alpha1
        * p.omega0
        * p.omega1
        * np.cos(p.phi0 - p.phi1)
        / (p.delta0d * p.delta1d * (p.delta0d + p.alpha0) * (p.delta1d + p.alpha1))
    )
    return float(static + drive)
