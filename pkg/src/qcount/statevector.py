"""Dense statevector simulation; the reference every other backend is checked against."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, CircuitError, Gate

MAX_QUBITS = 24

_INV_SQRT2 = 1 / np.sqrt(2)
MATRICES = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _INV_SQRT2,
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "T": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
}
PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": MATRICES["X"],
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass
class StateVector:
    n_qubits: int
    amps: np.ndarray

    def tensor(self) -> np.ndarray:
        """View with one axis per qubit, axis 0 = qubit 0."""
        return self.amps.reshape((2,) * self.n_qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amps.copy())


def bits_to_index(bits) -> int:
    if isinstance(bits, str):
        if not bits or set(bits) - {"0", "1"}:
            raise ValueError(f"not a bit string: {bits!r}")
        return int(bits, 2)
    idx = 0
    for b in bits:
        idx = (idx << 1) | int(bool(b))
    return idx


def index_to_bits(i: int, n: int) -> str:
    return format(i, f"0{n}b")


def init_zero(n: int, max_qubits: int = MAX_QUBITS) -> StateVector:
    if not 1 <= n <= max_qubits:
        raise ValueError(f"qubit count {n} outside [1, {max_qubits}]")
    amps = np.zeros(2**n, dtype=np.complex128)
    amps[0] = 1
    return StateVector(n, amps)


def from_amplitudes(amps) -> StateVector:
    amps = np.asarray(amps, dtype=np.complex128).copy()
    n = int(np.log2(len(amps)))
    if 2**n != len(amps):
        raise ValueError("length must be a power of two")
    return StateVector(n, amps)


def _slot(n, fixed: dict[int, int]):
    idx = [slice(None)] * n
    for q, v in fixed.items():
        idx[q] = v
    return tuple(idx)


def apply_gate(s: StateVector, g: Gate) -> StateVector:
    """Apply ``g`` in place and return ``s``."""
    n = s.n_qubits
    if max(g.qubits) >= n:
        raise CircuitError(f"gate {g} out of range for {n} qubits")
    psi = s.tensor()
    if g.is_controlled_x:
        fixed = {c: int(p) for c, p in zip(g.controls, g.polarities)}
        lo = _slot(n, {**fixed, g.target: 0})
        hi = _slot(n, {**fixed, g.target: 1})
        tmp = psi[lo].copy()
        psi[lo] = psi[hi]
        psi[hi] = tmp
        return s
    m = MATRICES[g.kind]
    lo = _slot(n, {g.target: 0})
    hi = _slot(n, {g.target: 1})
    a0 = psi[lo].copy()
    a1 = psi[hi]
    if g.kind in ("S", "T"):
        psi[hi] = a1 * m[1, 1]
        return s
    psi[lo] = m[0, 0] * a0 + m[0, 1] * a1
    psi[hi] = m[1, 0] * a0 + m[1, 1] * a1
    return s


def simulate(c: Circuit, max_qubits: int = MAX_QUBITS) -> StateVector:
    s = init_zero(c.n_qubits, max_qubits)
    for g in c.gates:
        apply_gate(s, g)
    return s


def amplitude(s: StateVector, bits) -> complex:
    _check_len(s, bits)
    return complex(s.amps[bits_to_index(bits)])


def prob(s: StateVector, bits) -> float:
    return abs(amplitude(s, bits)) ** 2


def probabilities(s: StateVector) -> np.ndarray:
    return np.abs(s.amps) ** 2


def marginal_prob0(s: StateVector, q: int) -> float:
    if not 0 <= q < s.n_qubits:
        raise ValueError(f"qubit {q} out of range")
    p = np.abs(s.tensor()[_slot(s.n_qubits, {q: 0})]) ** 2
    return float(p.sum())


def expectation(s: StateVector, pauli: str) -> float:
    """<psi|P|psi> for a Pauli string such as ``"XZI"`` (qubit 0 first)."""
    if len(pauli) != s.n_qubits:
        raise ValueError(f"Pauli string of length {len(pauli)} on {s.n_qubits} qubits")
    phi = s.tensor().copy()
    for q, sym in enumerate(pauli.upper()):
        if sym == "I":
            continue
        if sym not in PAULI:
            raise ValueError(f"unknown Pauli symbol {sym!r}")
        # contract the single-qubit matrix onto axis q
        phi = np.moveaxis(np.tensordot(PAULI[sym], phi, axes=([1], [q])), 0, q)
    value = np.vdot(s.amps, phi.reshape(-1))
    if abs(value.imag) > 1e-10:
        raise ArithmeticError(f"non-real Pauli expectation {value}")
    return float(value.real)


def unitary(c: Circuit) -> np.ndarray:
    """Full 2^n x 2^n matrix, column j = circuit applied to basis state j."""
    dim = 2**c.n_qubits
    out = np.empty((dim, dim), dtype=np.complex128)
    for j in range(dim):
        s = StateVector(c.n_qubits, np.zeros(dim, dtype=np.complex128))
        s.amps[j] = 1
        for g in c.gates:
            apply_gate(s, g)
        out[:, j] = s.amps
    return out


def _check_len(s, bits):
    if len(bits) != s.n_qubits:
        raise ValueError(f"basis string of length {len(bits)} on {s.n_qubits} qubits")
