from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcount.cnf import DimacsError, Literal, WeightedCnf, brute_force_wmc, export_weighted, parse_dimacs, read_dimacs

EQ3 = "p cnf 3 3\n1 0\n-1 2 0\n-1 -2 3 0\n"


def example31() -> WeightedCnf:
    f = WeightedCnf(3)
    f.add_clause(1, 2)
    f.add_clause(-1, 2)
    f.add_clause(3)
    f.set_weight(1, -0.5, 1 / 3)
    f.set_weight(2, 0.25, 0.75)
    return f


def truth_table_count(f: WeightedCnf) -> int:
    total = 0
    for bits in itertools.product((False, True), repeat=f.num_vars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in cl) for cl in f.clauses):
            total += 1
    return total


def test_parse_examples():
    assert parse_dimacs("p cnf 2 1\n1 -2 0").clauses == [(1, -2)]
    assert parse_dimacs("p cnf 1 2\n1 0\n-1 0").clauses == [(1,), (-1,)]
    f = parse_dimacs(EQ3)
    assert f.num_vars == 3 and f.clauses == [(1,), (-1, 2), (-1, -2, 3)]
    assert f.weights == {}


def test_clause_spanning_lines():
    assert parse_dimacs("p cnf 3 1\n1 2\n 3 0\n").clauses == [(1, 2, 3)]


@pytest.mark.parametrize(
    "text",
    ["1 0\n", "p cnf x 1\n1 0\n", "p dnf 2 1\n1 0\n", "p cnf 2 1\n3 0\n", "p cnf 2 1\n1 2\n", "p cnf 2 1\n1 a 0\n"],
)
def test_parse_errors(text):
    with pytest.raises(DimacsError):
        parse_dimacs(text)


def test_literal():
    assert Literal.from_int(-3) == Literal(3, True)
    assert int(Literal(2)) == 2
    with pytest.raises(ValueError):
        Literal(0)


def test_add_clause_checks_range():
    f = WeightedCnf(2)
    with pytest.raises(ValueError):
        f.add_clause(3)


def test_brute_force_examples():
    assert brute_force_wmc(example31()) == pytest.approx(-1 / 24, abs=1e-15)
    assert brute_force_wmc(WeightedCnf(1)) == 2
    assert brute_force_wmc(parse_dimacs(EQ3)) == 1
    assert brute_force_wmc(parse_dimacs("p cnf 1 2\n1 0\n-1 0")) == 0


def test_brute_force_guard():
    with pytest.raises(ValueError):
        brute_force_wmc(WeightedCnf(27))


def test_free_variables_contribute_weight_sum():
    f = WeightedCnf(3)
    f.add_clause(1)
    f.set_weight(2, 0.25, 0.5)
    f.set_weight(3, -2.0, 1.0)
    assert brute_force_wmc(f) == pytest.approx(0.75 * -1.0)


@pytest.mark.parametrize("seed", range(100))
def test_unbiased_count_matches_truth_table(seed):
    rng = random.Random(seed)
    v = rng.randint(3, 12)
    f = WeightedCnf(v)
    for _ in range(rng.randint(1, 3 * v)):
        f.add_clause(*(x if rng.random() < 0.5 else -x for x in rng.sample(range(1, v + 1), 3)))
    assert brute_force_wmc(f) == truth_table_count(f)


def test_export_smallest_biased_case():
    f = WeightedCnf(1)
    f.add_clause(1)
    f.set_weight(1, 0.5, 0.5)
    text = export_weighted(f)
    assert text.splitlines() == ["p cnf 1 1", "c t wmc", "c p weight 1 0.5 0", "c p weight -1 0.5 0", "1 0"]
    assert text.endswith("1 0\n")


def test_export_unbiased_has_no_weight_lines():
    assert "weight" not in export_weighted(parse_dimacs(EQ3))


def test_export_round_trip_example31():
    g = parse_dimacs(export_weighted(example31()))
    assert brute_force_wmc(g) == pytest.approx(-1 / 24, abs=1e-15)


def test_export_is_deterministic():
    assert export_weighted(example31()) == export_weighted(example31())


weights = st.sampled_from([1.0, -1.0, 0.5, -0.5, 0.7071067811865476, -0.7071067811865476, 0.75, 0.25, 1 / 3])


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_export_parse_is_bit_exact(data):
    v = data.draw(st.integers(1, 8))
    f = WeightedCnf(v)
    lit = st.integers(1, v).flatmap(lambda x: st.sampled_from([x, -x]))
    for cl in data.draw(st.lists(st.lists(lit, min_size=1, max_size=4), max_size=10)):
        f.add_clause(*cl)
    for var in data.draw(st.sets(st.integers(1, v))):
        f.set_weight(var, data.draw(weights), data.draw(weights))
    g = parse_dimacs(export_weighted(f))
    assert g.clauses == f.clauses
    assert g.weights == f.weights
    assert g.num_vars == f.num_vars


def test_read_bundled_example(fixture):
    f = read_dimacs(fixture("example31.cnf"))
    assert brute_force_wmc(f) == pytest.approx(-1 / 24, abs=1e-15)
