"""Circuit intermediate representation shared by every backend.

A circuit is an ordered list of gates over ``n_qubits`` wires, always started
from |0...0>. Qubit 0 is the top wire and the most significant bit of a basis
index, so the basis string ``"011"`` is index 3.

The text format (``.qc``)::

    # comment
    qubits 3
    h 0
    h 1
    ccx 0 1 2
    mcx !0 1 2      # '!' marks a negated control, last token is the target
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field

SINGLE_QUBIT = ("X", "H", "S", "T")
CONTROLLED = ("CNOT", "CCNOT", "MCX")
KINDS = SINGLE_QUBIT + CONTROLLED

_NAMES = {"x": "X", "h": "H", "s": "S", "t": "T", "cx": "CNOT", "ccx": "CCNOT", "mcx": "MCX"}
_TOKENS = {v: k for k, v in _NAMES.items()}


class CircuitError(ValueError):
    """Raised for structurally invalid gates or circuits."""


class ParseError(CircuitError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class CapabilityError(CircuitError):
    """A backend was asked to handle a gate it does not support."""


@dataclass(frozen=True)
class Gate:
    kind: str
    target: int
    controls: tuple[int, ...] = ()
    polarities: tuple[bool, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        controls = tuple(self.controls)
        polarities = tuple(self.polarities) if self.polarities else (True,) * len(controls)
        object.__setattr__(self, "controls", controls)
        object.__setattr__(self, "polarities", polarities)
        if len(polarities) != len(controls):
            raise CircuitError("one polarity per control required")
        if self.kind in SINGLE_QUBIT and controls:
            raise CircuitError(f"{self.kind} takes no controls")
        expected = {"CNOT": 1, "CCNOT": 2}.get(self.kind)
        if expected is not None and len(controls) != expected:
            raise CircuitError(f"{self.kind} needs exactly {expected} control(s)")
        if self.kind == "MCX" and not controls:
            raise CircuitError("MCX needs at least one control")
        qubits = self.qubits
        if len(set(qubits)) != len(qubits):
            raise CircuitError(f"duplicate qubit in {self.kind} gate: {qubits}")
        if min(qubits) < 0:
            raise CircuitError("qubit indices must be non-negative")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + (self.target,)

    @property
    def is_controlled_x(self) -> bool:
        return self.kind in CONTROLLED

    def __str__(self):
        ctrls = " ".join(("" if p else "!") + str(c) for c, p in zip(self.controls, self.polarities))
        return f"{_TOKENS[self.kind]} {ctrls} {self.target}".replace("  ", " ")


# Convenience constructors, mostly for tests and fixtures.
def X(q):
    return Gate("X", q)


def H(q):
    return Gate("H", q)


def S(q):
    return Gate("S", q)


def T(q):
    return Gate("T", q)


def CNOT(c, t):
    return Gate("CNOT", t, (c,))


def CCNOT(c1, c2, t):
    return Gate("CCNOT", t, (c1, c2))


def MCX(controls, t, polarities=None):
    controls = tuple(controls)
    return Gate("MCX", t, controls, tuple(polarities) if polarities is not None else ())


def controlled_x(controls, t, polarities=None) -> Gate:
    """Pick the narrowest kind (CNOT, CCNOT, MCX) for the control count."""
    controls = tuple(controls)
    kind = {1: "CNOT", 2: "CCNOT"}.get(len(controls), "MCX")
    return Gate(kind, t, controls, tuple(polarities) if polarities is not None else ())


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not isinstance(self.n_qubits, int) or self.n_qubits < 1:
            raise CircuitError("a circuit needs at least one qubit")
        gates = tuple(self.gates)
        object.__setattr__(self, "gates", gates)
        for g in gates:
            if max(g.qubits) >= self.n_qubits:
                raise CircuitError(f"gate {g} addresses a qubit outside [0, {self.n_qubits})")

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def kinds(self) -> set[str]:
        return {g.kind for g in self.gates}

    def then(self, *gates: Gate) -> "Circuit":
        return Circuit(self.n_qubits, self.gates + gates)


def parse_circuit(text: str) -> Circuit:
    n = None
    gates = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        spans = [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line)]
        if not spans:
            continue
        (first, col), args = spans[0], spans[1:]
        head = first.lower()
        if n is None:
            if head != "qubits" or len(args) != 1:
                raise ParseError("expected 'qubits <n>' header", lineno, col)
            n = _parse_index(*args[0], lineno)
            if n < 1:
                raise ParseError("qubit count must be positive", lineno, args[0][1])
            continue
        if head not in _NAMES:
            raise ParseError(f"unknown gate {first!r}", lineno, col)
        kind = _NAMES[head]
        arity = {"X": 1, "H": 1, "S": 1, "T": 1, "CNOT": 2, "CCNOT": 3}.get(kind)
        if arity is not None and len(args) != arity:
            raise ParseError(f"{head} takes {arity} qubit argument(s), got {len(args)}", lineno, col)
        if kind == "MCX" and len(args) < 2:
            raise ParseError("mcx needs at least one control and a target", lineno, col)
        if args[-1][0].startswith("!"):
            raise ParseError("target cannot be negated", lineno, args[-1][1])
        controls, polarities = [], []
        for tok, tcol in args[:-1]:
            negated = tok.startswith("!")
            controls.append(_parse_index(tok[1:] if negated else tok, tcol + negated, lineno))
            polarities.append(not negated)
        target = _parse_index(*args[-1], lineno)
        for q in controls + [target]:
            if q >= n:
                raise ParseError(f"qubit {q} out of range for {n} qubits", lineno, col)
        try:
            gates.append(Gate(kind, target, tuple(controls), tuple(polarities)))
        except CircuitError as exc:
            raise ParseError(str(exc), lineno, col) from None
    if n is None:
        raise ParseError("missing 'qubits <n>' header", 1)
    return Circuit(n, tuple(gates))


def _parse_index(tok: str, col: int, lineno: int) -> int:
    if not tok.isdigit():
        raise ParseError(f"expected a qubit index, got {tok!r}", lineno, col)
    return int(tok)


def serialize_circuit(c: Circuit) -> str:
    lines = [f"qubits {c.n_qubits}"]
    lines.extend(str(g) for g in c.gates)
    return "\n".join(lines) + "\n"


def read_circuit(path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return parse_circuit(fh.read())


def build_cnf_oracle(formula) -> Circuit:
    """Superpose all inputs, then compute ``f`` into an output qubit.

    Layout: qubits ``0..v-1`` hold the variables, then one ancilla per clause
    with two or more literals, then the output qubit. Each ancilla stores the
    negation of its clause and is uncomputed afterwards, so measuring the
    output yields 1 with probability ``#models / 2**v``.
    """
    v = formula.num_vars
    clauses = [tuple(cl) for cl in formula.clauses]
    for cl in clauses:
        if not cl:
            raise CircuitError("empty clause cannot be compiled into an oracle")
        for lit in cl:
            if abs(lit) > v or lit == 0:
                raise CircuitError(f"clause references undeclared variable {abs(lit)}")
        if any(-lit in cl for lit in cl):
            raise CircuitError(f"tautological clause {cl}")
    wide = [cl for cl in clauses if len(cl) > 1]
    n = v + len(wide) + 1
    out = n - 1
    gates = [H(q) for q in range(v)]
    compute = []
    for j, cl in enumerate(wide):
        ctrls = tuple(abs(lit) - 1 for lit in cl)
        # the ancilla fires when every literal is false
        pols = tuple(lit < 0 for lit in cl)
        compute.append(controlled_x(ctrls, v + j, pols))
    gates.extend(compute)
    ctrls, pols = [], []
    for cl in clauses:
        if len(cl) == 1:
            ctrls.append(abs(cl[0]) - 1)
            pols.append(cl[0] > 0)
    for j in range(len(wide)):
        ctrls.append(v + j)
        pols.append(False)
    if ctrls:
        # repeated single-literal clauses would duplicate a control
        merged: dict[int, bool] = {}
        for q, p in zip(ctrls, pols):
            if q in merged and merged[q] != p:
                # x and not-x both required: f is constant false
                merged = None
                break
            merged[q] = p
        if merged is not None:
            gates.append(controlled_x(tuple(merged), out, tuple(merged.values())))
    else:
        gates.append(X(out))
    gates.extend(reversed(compute))
    return Circuit(n, tuple(gates))


def canonicalize(c: Circuit) -> Circuit:
    """Rewrite negated controls as X-conjugated positive controls and map
    one/two-control MCX gates onto CNOT/CCNOT."""
    gates = []
    for g in c.gates:
        if not g.is_controlled_x:
            gates.append(g)
            continue
        flips = [X(q) for q, p in zip(g.controls, g.polarities) if not p]
        k = len(g.controls)
        kind = {1: "CNOT", 2: "CCNOT"}.get(k, "MCX")
        gates.extend(flips)
        gates.append(Gate(kind, g.target, g.controls))
        gates.extend(flips)
    return Circuit(c.n_qubits, tuple(gates))


def _sdg(q):
    return [S(q), S(q), S(q)]


def _tdg(q):
    # T^dagger = T . S^dagger, exact (no global phase)
    return [T(q)] + _sdg(q)


def toffoli_decomposition(a: int, b: int, c: int) -> list[Gate]:
    """Exact 7-T Clifford+T network for CCNOT(a, b -> c)."""
    return [
        H(c),
        CNOT(b, c), *_tdg(c),
        CNOT(a, c), T(c),
        CNOT(b, c), *_tdg(c),
        CNOT(a, c), T(b), T(c), H(c),
        CNOT(a, b), T(a), *_tdg(b),
        CNOT(a, b),
    ]


def lower_ccnot(c: Circuit) -> Circuit:
    gates = []
    for g in c.gates:
        if g.is_controlled_x and not all(g.polarities):
            raise CapabilityError("negated controls must be canonicalized before lowering")
        if g.kind == "MCX" and len(g.controls) > 2:
            raise CapabilityError("MCX with more than two controls cannot be lowered")
        if g.kind == "MCX" and len(g.controls) == 1:
            gates.append(CNOT(g.controls[0], g.target))
        elif g.kind == "CCNOT" or g.kind == "MCX":
            gates.extend(toffoli_decomposition(g.controls[0], g.controls[1], g.target))
        else:
            gates.append(g)
    if len(gates) == len(c.gates) and all(a == b for a, b in zip(gates, c.gates)):
        return c
    return Circuit(c.n_qubits, tuple(gates))


def to_clifford_t(c: Circuit) -> Circuit:
    """Canonicalize and lower so that only X, H, S, T, CNOT remain."""
    return lower_ccnot(canonicalize(c))


def inverse(c: Circuit) -> Circuit:
    gates = []
    for g in reversed(c.gates):
        if g.kind == "S":
            gates.extend([g] * 3)
        elif g.kind == "T":
            gates.extend([g] * 7)
        else:
            gates.append(g)
    return Circuit(c.n_qubits, tuple(gates))


TOFFOLI_H = ("X", "H", "CNOT", "CCNOT")
CLIFFORD_T = ("X", "H", "S", "T", "CNOT")
FULL = ("X", "H", "S", "T", "CNOT", "CCNOT", "MCX")


def random_circuit(n: int, n_gates: int, gate_set=FULL, rng=None, negated_controls=False) -> Circuit:
    """Uniformly pick gate kinds from ``gate_set`` (skipping those that need
    more qubits than available) and distinct random operands."""
    rng = rng if rng is not None else random.Random()
    if isinstance(rng, int):
        rng = random.Random(rng)
    need = {"CNOT": 2, "CCNOT": 3, "MCX": 2}
    kinds = [k for k in gate_set if need.get(k, 1) <= n]
    gates = []
    for _ in range(n_gates):
        kind = rng.choice(kinds)
        if kind in SINGLE_QUBIT:
            gates.append(Gate(kind, rng.randrange(n)))
            continue
        k = {"CNOT": 1, "CCNOT": 2}.get(kind) or rng.randint(1, n - 1)
        qs = rng.sample(range(n), k + 1)
        pols = tuple(rng.random() < 0.5 for _ in range(k)) if negated_controls else ()
        gates.append(Gate(kind, qs[-1], tuple(qs[:-1]), pols))
    return Circuit(n, tuple(gates))
