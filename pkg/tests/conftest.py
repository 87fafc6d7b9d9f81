from __future__ import annotations

import math
import random

import numpy as np
import pytest

from qcount.cli import fixture_path
from qcount.circuit import CLIFFORD_T, Circuit, Gate, random_circuit

_RESULTS: dict[str, tuple[bool, str]] = {}


def record(name: str, passed: bool, detail: str = ""):
    _RESULTS[name] = (bool(passed), detail)
    assert passed, f"{name}: {detail}"


@pytest.fixture
def accept():
    return record


@pytest.fixture
def fixture():
    return fixture_path


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in sorted(_RESULTS.items()):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")


def clifford_t_circuit(n: int, n_gates: int, rng: random.Random, max_t: int = 6) -> Circuit:
    """Random Clifford+T circuit with T gates beyond ``max_t`` turned into S."""
    c = random_circuit(n, n_gates, CLIFFORD_T, rng)
    gates, t_used = [], 0
    for g in c.gates:
        if g.kind == "T":
            t_used += 1
            if t_used > max_t:
                g = Gate("S", g.target)
        gates.append(g)
    return Circuit(n, tuple(gates))


def kron_reference(c: Circuit) -> np.ndarray:
    """Dense unitary from padded Kronecker products and projector sums."""
    from qcount.statevector import MATRICES

    eye, p0, p1 = np.eye(2), np.diag([1.0, 0.0]), np.diag([0.0, 1.0])

    def chain(factors):
        out = np.eye(1)
        for f in factors:
            out = np.kron(out, f)
        return out

    u = np.eye(2**c.n_qubits, dtype=complex)
    for g in c.gates:
        if g.is_controlled_x:
            on = [eye] * c.n_qubits
            for q, pol in zip(g.controls, g.polarities):
                on[q] = p1 if pol else p0
            flip = list(on)
            flip[g.target] = MATRICES["X"]
            on_id = chain(on)
            m = np.eye(2**c.n_qubits) - on_id + chain(flip)
        else:
            f = [eye] * c.n_qubits
            f[g.target] = MATRICES[g.kind]
            m = chain(f)
        u = m @ u
    return u


SQRT_HALF = 1 / math.sqrt(2)
