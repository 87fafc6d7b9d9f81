"""Computational-basis encoding of Toffoli+H circuits as weighted CNF.

Every satisfying assignment is one path through the intermediate basis
states; its weight is that path's contribution to the final amplitude. Each
Hadamard gets a variable ``h <-> (x and x')`` weighing -1/sqrt2 when true
and +1/sqrt2 when false, so the only negative step is |1> -> |1>.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .circuit import CapabilityError, Circuit, Gate
from .cnf import WeightedCnf
from .counter import count_models, count_weighted

SUPPORTED = frozenset({"X", "H", "CNOT", "CCNOT", "MCX"})
H_WEIGHT = 1 / math.sqrt(2)


@dataclass
class CompRegistry:
    """Variable bookkeeping: ``layers[t][q]`` is qubit q's variable after t gates."""

    layers: list[tuple[int, ...]] = field(default_factory=list)
    h_vars: list[int] = field(default_factory=list)

    @property
    def initial(self) -> tuple[int, ...]:
        return self.layers[0]

    @property
    def final(self) -> tuple[int, ...]:
        return self.layers[-1]


def _iff(f: WeightedCnf, a: int, b: int):
    f.add_clause(-a, b)
    f.add_clause(a, -b)


def _encode_x(f, q, q2):
    _iff(f, q2, -q)


def _encode_h(f, q, q2):
    h = f.new_var()
    f.add_clause(-h, q)
    f.add_clause(-h, q2)
    f.add_clause(h, -q, -q2)
    f.set_weight(h, -H_WEIGHT, H_WEIGHT)
    return h


def _encode_controlled_x(f, guard: list[int], t, t2):
    """t2 <-> t xor (AND of guard literals)."""
    off = [-lit for lit in guard]
    f.add_clause(*off, t, t2)
    f.add_clause(*off, -t, -t2)
    for lit in guard:
        f.add_clause(lit, -t, t2)
        f.add_clause(lit, t, -t2)


def encode_circuit_comp(c: Circuit) -> tuple[WeightedCnf, CompRegistry]:
    bad = c.kinds() - SUPPORTED
    if bad:
        raise CapabilityError(f"computational-basis encoding supports Toffoli+H only, got {sorted(bad)}")
    f = WeightedCnf()
    reg = CompRegistry()
    layer = [f.new_var() for _ in range(c.n_qubits)]
    for v in layer:
        f.add_clause(-v)
    reg.layers.append(tuple(layer))
    for g in c.gates:
        layer = list(layer)
        t = layer[g.target]
        # controls keep their value and therefore their variable
        t2 = f.new_var()
        if g.kind == "X":
            _encode_x(f, t, t2)
        elif g.kind == "H":
            reg.h_vars.append(_encode_h(f, t, t2))
        else:
            guard = [layer[q] if p else -layer[q] for q, p in zip(g.controls, g.polarities)]
            _encode_controlled_x(f, guard, t, t2)
        layer[g.target] = t2
        reg.layers.append(tuple(layer))
    return f, reg


def basis_units(variables, bits) -> list[int]:
    if len(bits) != len(variables):
        raise ValueError(f"basis string of length {len(bits)} for {len(variables)} qubits")
    return [v if str(b) == "1" else -v for v, b in zip(variables, bits)]


def measured_formula(c: Circuit, bits) -> WeightedCnf:
    f, reg = encode_circuit_comp(c)
    return f.with_units(basis_units(reg.final, bits))


def amplitude_wmc(c: Circuit, bits) -> float:
    return count_weighted(measured_formula(c, bits))


def path_count(c: Circuit) -> int:
    f, _ = encode_circuit_comp(c)
    return count_models(f)
