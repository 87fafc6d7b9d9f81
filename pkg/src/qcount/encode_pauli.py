"""Pauli-basis encoding of Clifford+T circuits as real-weighted CNF.

The density matrix of the output state is written as a weighted sum of
signed Pauli strings. Per qubit, a bit pair (x, z) selects the Pauli
(00 I, 01 Z, 10 X, 11 Y) and one sign bit r per time step carries the
factor (-1)^r. Clifford gates permute signed strings; a T gate splits X and
Y into two strings, marked by a variable ``u`` that weighs 1/sqrt2.

The initial |0..0><0..0| is encoded without its 1/2^n prefactor, so the
count for a single final Pauli string P is Tr(P rho).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .circuit import CapabilityError, Circuit, Gate
from .cnf import WeightedCnf
from .counter import count_weighted

SUPPORTED = frozenset({"X", "H", "S", "T", "CNOT"})
U_WEIGHT = 1 / math.sqrt(2)
PAULI_OF = {(0, 0): "I", (0, 1): "Z", (1, 0): "X", (1, 1): "Y"}


@dataclass(frozen=True)
class PauliTerm:
    x: tuple[int, ...]
    z: tuple[int, ...]
    r: int = 0
    coefficient: float | None = None

    @property
    def label(self) -> str:
        return "".join(PAULI_OF[b] for b in zip(self.x, self.z))

    @property
    def sign(self) -> int:
        return -1 if self.r else 1

    @classmethod
    def from_label(cls, label: str, r: int = 0) -> "PauliTerm":
        inv = {v: k for k, v in PAULI_OF.items()}
        pairs = [inv[ch] for ch in label.upper()]
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs), r)


@dataclass(frozen=True)
class Layer:
    x: tuple[int, ...]
    z: tuple[int, ...]
    r: int

    def variables(self) -> tuple[int, ...]:
        return self.x + self.z + (self.r,)


def _prime_cubes(cubes: set[tuple]) -> set[tuple]:
    """Prime implicants of a set of cubes (tuples over {0, 1, None})."""
    primes = set()
    current = set(cubes)
    while current:
        merged, used = set(), set()
        for a, b in itertools.combinations(current, 2):
            diff = [i for i, (p, q) in enumerate(zip(a, b)) if p != q]
            if len(diff) == 1 and a[diff[0]] is not None and b[diff[0]] is not None:
                c = list(a)
                c[diff[0]] = None
                merged.add(tuple(c))
                used.update((a, b))
        primes |= current - used
        current = merged
    return primes


def _covers(cube, point) -> bool:
    return all(c is None or c == p for c, p in zip(cube, point))


def add_constraint(f: WeightedCnf, variables, predicate):
    """Add CNF clauses equivalent to ``predicate`` over ``variables``.

    The falsifying assignments are merged into prime cubes and a greedy
    cover is negated into clauses, so e.g. an equivalence costs two clauses.
    """
    variables = tuple(variables)
    bad = {bits for bits in itertools.product((0, 1), repeat=len(variables)) if not predicate(*bits)}
    if not bad:
        return
    primes = sorted(_prime_cubes(bad), key=lambda c: (-sum(x is None for x in c), [2 if x is None else x for x in c]))
    uncovered = set(bad)
    for cube in primes:
        hit = {p for p in uncovered if _covers(cube, p)}
        if not hit:
            continue
        uncovered -= hit
        f.add_clause(*(-v if bit else v for v, bit in zip(variables, cube) if bit is not None))
        if not uncovered:
            break


class PauliEncoder:
    """Incrementally builds the formula, one time step per gate."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("need at least one qubit")
        self.n = n
        self.cnf = WeightedCnf()
        xs = tuple(self.cnf.new_var() for _ in range(n))
        zs = tuple(self.cnf.new_var() for _ in range(n))
        r = self.cnf.new_var()
        self.cnf.add_clause(-r)
        for v in xs:
            self.cnf.add_clause(-v)
        self.layers = [Layer(xs, zs, r)]
        self.u_vars: list[int] = []

    @property
    def current(self) -> Layer:
        return self.layers[-1]

    def _step(self, touched):
        cur = self.current
        xs, zs = list(cur.x), list(cur.z)
        for q in touched:
            xs[q] = self.cnf.new_var()
            zs[q] = self.cnf.new_var()
        nxt = Layer(tuple(xs), tuple(zs), self.cnf.new_var())
        self.layers.append(nxt)
        return cur, nxt

    def apply(self, g: Gate):
        if g.kind not in SUPPORTED or (g.kind == "CNOT" and not all(g.polarities)):
            if g.kind in ("CCNOT", "MCX"):
                raise CapabilityError(f"{g.kind} is not Clifford; lower it to Clifford+T first")
            raise CapabilityError(f"Pauli encoding cannot handle {g}")
        f = self.cnf
        if g.kind == "CNOT":
            c, t = g.controls[0], g.target
            a, b = self._step((c, t))
            add_constraint(f, (a.x[c], b.x[c]), lambda x, x2: x2 == x)
            add_constraint(f, (a.z[t], b.z[t]), lambda z, z2: z2 == z)
            add_constraint(f, (a.x[t], a.x[c], b.x[t]), lambda xt, xc, o: o == xt ^ xc)
            add_constraint(f, (a.z[c], a.z[t], b.z[c]), lambda zc, zt, o: o == zc ^ zt)
            add_constraint(
                f,
                (a.r, a.x[c], a.z[t], a.x[t], a.z[c], b.r),
                lambda r, xc, zt, xt, zc, r2: r2 == r ^ (xc & zt & (xt ^ (1 - zc))),
            )
            return
        q = g.target
        a, b = self._step((q,))
        x, z, x2, z2, r, r2 = a.x[q], a.z[q], b.x[q], b.z[q], a.r, b.r
        if g.kind == "H":
            add_constraint(f, (r, x, z, r2), lambda r, x, z, o: o == r ^ (x & z))
            add_constraint(f, (z, x2), lambda z, x2: x2 == z)
            add_constraint(f, (x, z2), lambda x, z2: z2 == x)
        elif g.kind == "S":
            add_constraint(f, (x, x2), lambda x, x2: x2 == x)
            add_constraint(f, (z, x, z2), lambda z, x, z2: z2 == z ^ x)
            add_constraint(f, (r, x, z, r2), lambda r, x, z, o: o == r ^ (x & z))
        elif g.kind == "X":
            add_constraint(f, (x, x2), lambda x, x2: x2 == x)
            add_constraint(f, (z, z2), lambda z, z2: z2 == z)
            add_constraint(f, (r, z, r2), lambda r, z, o: o == r ^ z)
        else:  # T
            u = f.new_var()
            f.set_weight(u, U_WEIGHT, 1.0)
            self.u_vars.append(u)
            add_constraint(f, (x, x2), lambda x, x2: x2 == x)
            add_constraint(f, (x, z, z2), lambda x, z, z2: x or z2 == z)
            add_constraint(f, (r, x, z, z2, r2), lambda r, x, z, z2, o: o == r ^ (x & z & (1 - z2)))
            add_constraint(f, (u, x), lambda u, x: u == x)

    def formula(self) -> WeightedCnf:
        """The circuit formula with the final sign variable weighted -1/+1."""
        out = self.cnf.copy()
        out.set_weight(self.current.r, -1.0, 1.0)
        return out

    def observable_units(self, pauli) -> list[int]:
        """Unit literals pinning the final layer to one (unsigned) Pauli string."""
        term = PauliTerm.from_label(pauli) if isinstance(pauli, str) else pauli
        if len(term.x) != self.n:
            raise ValueError(f"Pauli string of length {len(term.x)} on {self.n} qubits")
        layer = self.current
        lits = [v if bit else -v for v, bit in zip(layer.x, term.x)]
        lits += [v if bit else -v for v, bit in zip(layer.z, term.z)]
        return lits


def encode_init_pauli(n: int) -> PauliEncoder:
    return PauliEncoder(n)


def encode_gate_pauli(enc: PauliEncoder, g: Gate) -> PauliEncoder:
    enc.apply(g)
    return enc


def encode_circuit_pauli(c: Circuit) -> PauliEncoder:
    enc = PauliEncoder(c.n_qubits)
    for g in c.gates:
        enc.apply(g)
    return enc


def z_observable(n: int, q: int) -> str:
    if not 0 <= q < n:
        raise ValueError(f"qubit {q} out of range")
    return "".join("Z" if i == q else "I" for i in range(n))


def measured_formula(c: Circuit, q: int) -> WeightedCnf:
    enc = encode_circuit_pauli(c)
    return enc.formula().with_units(enc.observable_units(z_observable(c.n_qubits, q)))


def pauli_coefficient_wmc(c: Circuit, pauli: str) -> float:
    """Tr(P rho) for the circuit's output state, by weighted counting."""
    enc = encode_circuit_pauli(c)
    return count_weighted(enc.formula().with_units(enc.observable_units(pauli)))


def expectation_z_wmc(c: Circuit, q: int) -> float:
    return count_weighted(measured_formula(c, q))


def prob0_pauli(c: Circuit, q: int, eps: float = 1e-9) -> float:
    p = 0.5 * (1 + expectation_z_wmc(c, q))
    if not -eps <= p <= 1 + eps:
        raise ArithmeticError(f"probability {p} outside [0, 1]")
    return min(1.0, max(0.0, p))
