from __future__ import annotations

import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import kron_reference
from qcount import dd
from qcount.circuit import (
    CCNOT, CNOT, FULL, MCX, Circuit, H, S, T, X, inverse, lower_ccnot, random_circuit, toffoli_decomposition,
)
from qcount.statevector import probabilities, simulate, unitary

R = 1 / math.sqrt(2)
KINDS = ["ADD", "QMDD"]
EASY = Circuit(3, (H(0), H(1), CCNOT(0, 1, 2)))
BELL_UNCOMPUTE = Circuit(2, (H(0), CNOT(0, 1), CNOT(0, 1), H(0)))
DOUBLING = [1, 2, 2, 4, 4, 8, 8, 16]


@pytest.fixture(params=KINDS)
def mgr(request):
    return dd.Manager(request.param)


@pytest.mark.parametrize(
    "kind, vec, nodes, terminals",
    [
        ("ADD", 0.5 * np.array([1, 1, 1, 1, 0, 0, 0, 0]), 3, 2),
        ("ADD", [1, 0, 2, 0, 1, 0, -2, 0], 6, 4),
        ("QMDD", [1, 0, 2, 0, 1, 0, -2, 0], 4, 2),
        ("ADD", DOUBLING, 7, 5),
        ("QMDD", DOUBLING, 3, 1),
    ],
)
def test_vector_node_counts(kind, vec, nodes, terminals):
    e = dd.dd_from_vector(vec, kind)
    assert dd.node_count(e) == nodes
    assert dd.terminal_count(e) == terminals
    np.testing.assert_allclose(dd.dd_to_vector(e), vec, atol=1e-12)


def test_qmdd_edge_constants_for_alternating_vector():
    m = dd.Manager("QMDD")
    e = m.from_vector([1, 0, 2, 0, 1, 0, -2, 0])
    assert e.weight == 1
    low, high = e.node.children
    assert low.weight == 1 and high.weight == 1
    # the two level-1 nodes differ only in the sign of the second half
    assert low.node is not high.node
    assert {c.weight for c in low.node.children} == {1, 2}
    assert {c.weight for c in high.node.children} == {1, -2}
    assert m.is_normalized(e)


def test_basis_and_errors(mgr):
    e = mgr.basis_state("00")
    np.testing.assert_allclose(mgr.to_vector(e), [1, 0, 0, 0])
    with pytest.raises(dd.DDError):
        mgr.from_vector([1, 0, 0])
    with pytest.raises(dd.DDError):
        mgr.to_vector(mgr.from_gate(X(0), 1))


def test_h_gate_diagram(mgr):
    e = mgr.from_gate(H(0), 1)
    assert mgr.node_count(e) == 1
    np.testing.assert_allclose(mgr.to_matrix(e), [[R, R], [R, -R]], atol=1e-15)
    if mgr.kind == "ADD":
        values = sorted(nd.value.real for nd in mgr.nodes(e) if isinstance(nd, dd.Terminal))
        assert values == pytest.approx([-R, R])


def test_cnot_and_x_matrices(mgr):
    np.testing.assert_allclose(
        mgr.to_matrix(mgr.from_gate(CNOT(0, 1), 2)),
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
    )
    np.testing.assert_allclose(mgr.to_matrix(mgr.from_gate(X(0), 1)), [[0, 1], [1, 0]])


@pytest.mark.parametrize("seed", range(40))
def test_gate_diagrams_match_kronecker_reference(seed, mgr):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    (g,) = random_circuit(n, 1, FULL, rng, negated_controls=True).gates
    np.testing.assert_allclose(mgr.to_matrix(mgr.from_gate(g, n), n), kron_reference(Circuit(n, (g,))), atol=1e-12)


def test_apply_examples(mgr):
    plus = mgr.multiply(mgr.from_gate(H(0), 1), mgr.basis_state("0"))
    np.testing.assert_allclose(mgr.to_vector(plus), [R, R])
    out = mgr.multiply(mgr.from_gate(CNOT(0, 1), 2), mgr.basis_state("10"))
    assert out == mgr.basis_state("11")


def test_module_level_api_checks_kind():
    a = dd.dd_from_vector([1, 0], "ADD")
    q = dd.dd_from_vector([1, 0], "QMDD")
    with pytest.raises(dd.DDError):
        dd.add(a, q)
    with pytest.raises(dd.DDError):
        dd.apply(dd.dd_from_gate(H(0), 1, "ADD"), q)
    with pytest.raises(dd.DDError):
        dd.apply(q, q)


def test_size_mismatch(mgr):
    with pytest.raises(dd.DDError):
        mgr.multiply(mgr.from_gate(H(0), 2), mgr.basis_state("0"))
    with pytest.raises(dd.DDError):
        mgr.add(mgr.basis_state("0"), mgr.basis_state("00"))


def test_add_examples(mgr):
    e = mgr.add(mgr.basis_state("0"), mgr.basis_state("1"))
    np.testing.assert_allclose(mgr.to_vector(e), [1, 1])
    v = mgr.from_vector([0.5, -1j, 0, 2])
    assert mgr.add(v, mgr.zero) == v
    half = mgr.scale(mgr.basis_state("10"), 0.5)
    assert mgr.add(half, mgr.scale(mgr.basis_state("10"), -0.5)) == mgr.zero


def _dyadic_vector(rng, n):
    units = [1, -1, 1j, -1j]
    return np.array([0 if rng.random() < 0.3 else rng.choice(units) * rng.choice([1, 2, 0.5]) for _ in range(2**n)])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(0, 10**6), st.sampled_from(KINDS))
def test_add_is_commutative_and_associative(n, seed, kind):
    rng = np.random.default_rng(seed)
    m = dd.Manager(kind)
    a, b, c = (m.from_vector(rng.normal(size=2**n) + 1j * rng.normal(size=2**n)) for _ in range(3))
    np.testing.assert_allclose(m.to_vector(m.add(a, b)), m.to_vector(m.add(b, a)), atol=1e-12)
    left = m.to_vector(m.add(m.add(a, b), c))
    right = m.to_vector(m.add(a, m.add(b, c)))
    np.testing.assert_allclose(left, right, atol=1e-12)
    np.testing.assert_allclose(left, m.to_vector(a) + m.to_vector(b) + m.to_vector(c), atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10**6), st.sampled_from(KINDS))
def test_round_trip(n, seed, kind):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    v[rng.random(2**n) < 0.3] = 0
    m = dd.Manager(kind)
    e = m.from_vector(v)
    np.testing.assert_allclose(m.to_vector(e, n), v, atol=1e-12)
    if kind == "QMDD":
        assert m.is_normalized(e)


@pytest.mark.parametrize("seed", range(30))
def test_canonical_across_construction_orders(seed, mgr):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    v = _dyadic_vector(rng, n)
    direct = mgr.from_vector(v)
    order = list(range(2**n))
    rng.shuffle(order)
    summed = mgr.zero
    for i in order:
        summed = mgr.add(summed, mgr.scale(mgr.basis_state(format(i, f"0{n}b")), v[i]))
    assert summed.node is direct.node
    assert summed.weight == direct.weight


def test_simulation_examples():
    m = dd.Manager("QMDD")
    e = m.simulate(BELL_UNCOMPUTE)
    assert e.node is m.basis_state("00").node
    assert e.weight == pytest.approx(1, abs=1e-15)
    assert m.node_count(e) == 2
    uniform = m.simulate(Circuit(3, (H(0), H(1), H(2))))
    assert m.node_count(uniform) == 3
    easy = m.simulate(EASY)
    assert dd.measure_prob(easy, "000") == pytest.approx(0.25)
    assert dd.measure_prob(easy, "001") == 0
    assert dd.measure_prob(m.basis_state("00"), "00") == 1


def test_easy_circuit_vector(mgr):
    np.testing.assert_allclose(mgr.to_vector(mgr.simulate(EASY)), 0.5 * np.array([1, 0, 1, 0, 1, 0, 0, 1]), atol=1e-15)


def test_measure_length_mismatch(mgr):
    with pytest.raises(dd.DDError):
        mgr.amplitude(mgr.basis_state("00"), "0")


@pytest.mark.parametrize("seed", range(40))
def test_simulation_matches_statevector(seed, mgr):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    c = random_circuit(n, rng.randint(0, 25), FULL, rng, negated_controls=True)
    e = mgr.simulate(c)
    np.testing.assert_allclose(np.abs(mgr.to_vector(e, n)) ** 2, probabilities(simulate(c)), atol=1e-9)
    if mgr.kind == "QMDD":
        assert mgr.is_normalized(e)


@pytest.mark.parametrize("seed", range(15))
def test_circuit_matrix(seed, mgr):
    c = random_circuit(3, 10, FULL, seed, negated_controls=True)
    np.testing.assert_allclose(mgr.to_matrix(mgr.circuit_matrix(c), 3), unitary(c), atol=1e-12)


@pytest.mark.parametrize("kind", KINDS)
def test_equiv_examples(kind):
    assert dd.equiv_check(BELL_UNCOMPUTE, Circuit(2), kind).verdict is dd.Verdict.EQUAL
    lowered = Circuit(3, tuple(toffoli_decomposition(0, 1, 2)))
    assert dd.equiv_check(Circuit(3, (CCNOT(0, 1, 2),)), lowered, kind).verdict is dd.Verdict.EQUAL
    assert dd.equiv_check(Circuit(1, (X(0),)), Circuit(1), kind).verdict is dd.Verdict.NOT_EQUAL
    assert dd.equiv_check(Circuit(1, (S(0), S(0))), Circuit(1), kind).verdict is dd.Verdict.NOT_EQUAL


@pytest.mark.parametrize("kind", KINDS)
def test_equiv_global_phase(kind):
    # X Z X Z = -I, with Z spelled H X H
    z = (H(0), X(0), H(0))
    c = Circuit(1, (X(0),) + z + (X(0),) + z)
    result = dd.equiv_check(c, Circuit(1), kind)
    assert result.verdict is dd.Verdict.EQUAL_UP_TO_GLOBAL_FACTOR
    assert result.factor == pytest.approx(-1)
    # T^8 = I exactly, T^4 = Z
    assert dd.equiv_check(Circuit(1, (T(0),) * 8), Circuit(1), kind).verdict is dd.Verdict.EQUAL


def test_equiv_qubit_mismatch():
    with pytest.raises(dd.DDError):
        dd.equiv_check(Circuit(1), Circuit(2))


@pytest.mark.parametrize("seed", range(15))
def test_equiv_with_inverse(seed):
    c = random_circuit(4, 12, FULL, seed, negated_controls=True)
    assert dd.equiv_check(c, c).verdict is dd.Verdict.EQUAL
    assert dd.equiv_check(c.then(*inverse(c).gates), Circuit(4)).verdict is dd.Verdict.EQUAL
    flipped = c.then(X(seed % 4))
    assert dd.equiv_check(c, flipped).verdict is dd.Verdict.NOT_EQUAL


def test_lowering_equivalence():
    c = Circuit(3, (CCNOT(0, 1, 2),))
    assert dd.equiv_check(c, lower_ccnot(c), "QMDD").verdict is dd.Verdict.EQUAL


def test_mcx_diagram(mgr):
    g = MCX((0, 2, 3), 1, (True, False, True))
    np.testing.assert_allclose(mgr.to_matrix(mgr.from_gate(g, 4), 4), kron_reference(Circuit(4, (g,))), atol=1e-15)
