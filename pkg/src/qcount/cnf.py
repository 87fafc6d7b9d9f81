"""Weighted CNF formulas, DIMACS input and weighted-CNF output.

Literals are DIMACS integers: ``v`` is the positive literal of variable ``v``
and ``-v`` its negation. A variable without a weight entry is unbiased,
meaning both of its literals weigh 1.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

BRUTE_FORCE_LIMIT = 26


class DimacsError(ValueError):
    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


@dataclass(frozen=True)
class Literal:
    variable: int
    negated: bool = False

    def __post_init__(self):
        if self.variable < 1:
            raise ValueError("variables are numbered from 1")

    @classmethod
    def from_int(cls, lit: int) -> "Literal":
        return cls(abs(lit), lit < 0)

    def __int__(self):
        return -self.variable if self.negated else self.variable


@dataclass
class WeightedCnf:
    num_vars: int = 0
    clauses: list[tuple[int, ...]] = field(default_factory=list)
    weights: dict[int, float] = field(default_factory=dict)

    def new_var(self) -> int:
        self.num_vars += 1
        return self.num_vars

    def add_clause(self, *lits: int):
        for lit in lits:
            if lit == 0 or abs(lit) > self.num_vars:
                raise ValueError(f"literal {lit} outside declared variables 1..{self.num_vars}")
        self.clauses.append(tuple(lits))

    def set_weight(self, var: int, positive: float, negative: float):
        if not 1 <= var <= self.num_vars:
            raise ValueError(f"variable {var} not declared")
        if positive == 1 and negative == 1:
            self.weights.pop(var, None)
            self.weights.pop(-var, None)
            return
        self.weights[var] = float(positive)
        self.weights[-var] = float(negative)

    def weight(self, lit: int) -> float:
        return self.weights.get(lit, 1.0)

    def biased_vars(self) -> list[int]:
        return sorted({abs(lit) for lit in self.weights})

    def copy(self) -> "WeightedCnf":
        return WeightedCnf(self.num_vars, list(self.clauses), dict(self.weights))

    def unweighted(self) -> "WeightedCnf":
        return WeightedCnf(self.num_vars, list(self.clauses), {})

    def with_units(self, lits) -> "WeightedCnf":
        f = self.copy()
        for lit in lits:
            f.add_clause(lit)
        return f


def parse_dimacs(text: str) -> WeightedCnf:
    """Read DIMACS CNF; ``c p weight <lit> <w> 0`` comment lines set weights."""
    header = None
    clauses: list[tuple[int, ...]] = []
    weights: dict[int, float] = {}
    pending: list[int] = []
    pending_line = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens:
            continue
        if tokens[0] == "c":
            if tokens[1:3] == ["p", "weight"]:
                if len(tokens) < 5 or (len(tokens) == 6 and tokens[5] != "0") or len(tokens) > 6:
                    raise DimacsError("malformed weight line", lineno)
                try:
                    lit, w = int(tokens[3]), float(tokens[4])
                except ValueError:
                    raise DimacsError("malformed weight line", lineno) from None
                weights[lit] = w
            continue
        if tokens[0] == "p":
            if header is not None:
                raise DimacsError("duplicate header", lineno)
            if len(tokens) != 4 or tokens[1] != "cnf":
                raise DimacsError("expected 'p cnf <vars> <clauses>'", lineno)
            try:
                header = (int(tokens[2]), int(tokens[3]))
            except ValueError:
                raise DimacsError("non-integer header field", lineno) from None
            if min(header) < 0:
                raise DimacsError("negative header field", lineno)
            continue
        if header is None:
            raise DimacsError("clause before 'p cnf' header", lineno)
        for tok in tokens:
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"bad literal {tok!r}", lineno) from None
            if lit == 0:
                clauses.append(tuple(pending))
                pending = []
                pending_line = None
                continue
            if abs(lit) > header[0]:
                raise DimacsError(f"literal {lit} exceeds declared variable count {header[0]}", lineno)
            pending.append(lit)
            pending_line = pending_line or lineno
    if header is None:
        raise DimacsError("missing 'p cnf' header")
    if pending:
        raise DimacsError("clause missing terminating 0", pending_line)
    f = WeightedCnf(header[0], clauses)
    for var in sorted({abs(lit) for lit in weights}):
        if var > header[0]:
            raise DimacsError(f"weight for undeclared variable {var}")
        f.set_weight(var, weights.get(var, 1.0), weights.get(-var, 1.0))
    return f


def read_dimacs(path) -> WeightedCnf:
    with open(path, encoding="utf-8") as fh:
        return parse_dimacs(fh.read())


def _fmt(w: float) -> str:
    return format(w, ".17g")


def export_weighted(f: WeightedCnf) -> str:
    lines = [f"p cnf {f.num_vars} {len(f.clauses)}", "c t wmc"]
    for var in f.biased_vars():
        for lit in (var, -var):
            lines.append(f"c p weight {lit} {_fmt(f.weight(lit))} 0")
    lines.extend(" ".join(map(str, cl + (0,))) for cl in f.clauses)
    return "\n".join(lines) + "\n"


def brute_force_wmc(f: WeightedCnf, chunk_bits: int = 16) -> float:
    """Sum of weights over all satisfying assignments, by full enumeration."""
    n = f.num_vars
    if n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"{n} variables exceed the enumeration guard of {BRUTE_FORCE_LIMIT}")
    if any(len(cl) == 0 for cl in f.clauses):
        return 0.0
    w_pos = np.array([f.weight(v) for v in range(1, n + 1)])
    w_neg = np.array([f.weight(-v) for v in range(1, n + 1)])
    low = min(n, chunk_bits)
    # variable v (1-based) is bit (n - v) of the assignment index
    idx = np.arange(2**low, dtype=np.int64)
    low_bits = [(idx >> (n - v)) & 1 for v in range(n - low + 1, n + 1)]
    total = 0.0
    for high in itertools.product((0, 1), repeat=n - low):
        bits = [np.full(idx.shape, b, dtype=np.int64) for b in high] + low_bits
        ok = np.ones(idx.shape, dtype=bool)
        for cl in f.clauses:
            sat = np.zeros(idx.shape, dtype=bool)
            for lit in cl:
                b = bits[abs(lit) - 1]
                sat |= (b == 1) if lit > 0 else (b == 0)
            ok &= sat
        if not ok.any():
            continue
        weight = np.ones(idx.shape)
        for v in range(n):
            if w_pos[v] != 1.0 or w_neg[v] != 1.0:
                weight *= np.where(bits[v] == 1, w_pos[v], w_neg[v])
        total += float(weight[ok].sum())
    return total
