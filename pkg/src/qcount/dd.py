"""Decision diagrams over qubits: ADD and QMDD.

Both kinds share one graph layout. A vector node at level ``q`` splits on
qubit ``q`` into (low, high) edges; a matrix node splits on (row bit,
column bit) of qubit ``q`` into four edges ordered 00, 01, 10, 11. Levels
are never skipped: every nonzero edge from level ``q`` leads to level
``q + 1`` or, below the last qubit, to a terminal. The all-zero function is
the zero edge (weight 0, zero terminal) and never a node.

ADD merges nodes computing the same function and keeps values in terminals
(edge weights are 1). QMDD merges nodes equal up to a scalar factor, carries
the factors on edges and has a single terminal 1; a node's leftmost nonzero
edge has weight exactly 1.

Weights are hashed after rounding real and imaginary parts to a 1e-12 grid.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .circuit import Circuit, Gate, inverse
from .statevector import MATRICES

QUANTUM = 1e-12
ADD = "ADD"
QMDD = "QMDD"
_I2 = np.eye(2, dtype=complex)
_P0 = np.array([[1, 0], [0, 0]], dtype=complex)
_P1 = np.array([[0, 0], [0, 1]], dtype=complex)


class DDError(ValueError):
    pass


def qkey(w: complex) -> tuple[int, int]:
    return (round(w.real / QUANTUM), round(w.imag / QUANTUM))


class Terminal:
    __slots__ = ("id", "value", "mgr")
    level = None
    children = ()

    def __init__(self, id, value, mgr):
        self.id, self.value, self.mgr = id, value, mgr

    def __repr__(self):
        return f"Terminal({self.value})"


class Node:
    __slots__ = ("id", "level", "children", "mgr")

    def __init__(self, id, level, children, mgr):
        self.id, self.level, self.children, self.mgr = id, level, children, mgr

    @property
    def is_matrix(self) -> bool:
        return len(self.children) == 4

    def __repr__(self):
        return f"Node(id={self.id}, level={self.level})"


class Edge(NamedTuple):
    weight: complex
    node: object


class Manager:
    """Unique table, terminals and operation caches for one diagram kind."""

    def __init__(self, kind: str = QMDD):
        kind = kind.upper()
        if kind not in (ADD, QMDD):
            raise DDError(f"unknown diagram kind {kind!r}")
        self.kind = kind
        self._ids = 0
        self.zero_terminal = self._new_terminal(0j)
        self.zero = Edge(0j, self.zero_terminal)
        self._terminals: dict[tuple[int, int], Terminal] = {}
        self.one_terminal = self._terminal_node(1 + 0j)
        self.unique: dict[tuple, Node] = {}
        self.clear_caches()

    def clear_caches(self):
        self._add_cache: dict[tuple, Edge] = {}
        self._mul_cache: dict[tuple, Edge] = {}
        self._scale_cache: dict[tuple, Edge] = {}
        self._gate_cache: dict[tuple, Edge] = {}

    def _next_id(self) -> int:
        self._ids += 1
        return self._ids - 1

    def _new_terminal(self, value) -> Terminal:
        return Terminal(self._next_id(), complex(value), self)

    def _terminal_node(self, value) -> Terminal:
        key = qkey(value)
        t = self._terminals.get(key)
        if t is None:
            t = self._terminals[key] = self._new_terminal(value)
        return t

    # -- construction ---------------------------------------------------

    def is_zero(self, e: Edge) -> bool:
        return e.node is self.zero_terminal

    def constant(self, value) -> Edge:
        value = complex(value)
        if qkey(value) == (0, 0):
            return self.zero
        if self.kind == QMDD:
            return Edge(value, self.one_terminal)
        return Edge(1 + 0j, self._terminal_node(value))

    def _clean(self, e: Edge) -> Edge:
        if e.node is self.zero_terminal or qkey(e.weight) == (0, 0):
            return self.zero
        return e

    def make(self, level: int, children) -> Edge:
        """Canonical edge for a node with the given children."""
        children = tuple(self._clean(c) for c in children)
        pivot = next((i for i, c in enumerate(children) if c.node is not self.zero_terminal), None)
        if pivot is None:
            return self.zero
        for c in children:
            if c.node.level is not None and c.node.level != level + 1:
                raise DDError(f"child at level {c.node.level} below level {level}")
        if self.kind == ADD:
            key = (level, tuple(c.node.id for c in children))
            factor = 1 + 0j
        else:
            factor = children[pivot].weight
            normed = []
            for i, c in enumerate(children):
                if i == pivot:
                    normed.append(Edge(1 + 0j, c.node))
                elif c.node is self.zero_terminal:
                    normed.append(self.zero)
                else:
                    normed.append(self._clean(Edge(c.weight / factor, c.node)))
            children = tuple(normed)
            key = (level, tuple((c.node.id, qkey(c.weight)) for c in children))
        node = self.unique.get(key)
        if node is None:
            node = self.unique[key] = Node(self._next_id(), level, children, self)
        return Edge(factor, node)

    def own(self, *edges):
        for e in edges:
            if e.node.mgr is not self:
                raise DDError("diagram belongs to a different manager (or kind)")

    def from_vector(self, v) -> Edge:
        v = np.asarray(v, dtype=complex).reshape(-1)
        n = _log2(len(v))

        def build(level, lo, hi):
            if level == n:
                return self.constant(v[lo])
            mid = (lo + hi) // 2
            return self.make(level, (build(level + 1, lo, mid), build(level + 1, mid, hi)))

        return build(0, 0, len(v))

    def basis_state(self, bits) -> Edge:
        e = self.constant(1)
        for level in range(len(bits) - 1, -1, -1):
            e = self.make(level, (self.zero, e) if str(bits[level]) == "1" else (e, self.zero))
        return e

    def kron(self, mats) -> Edge:
        """Diagram of mats[0] (x) mats[1] (x) ... with 2x2 factors."""
        e = self.constant(1)
        for level in range(len(mats) - 1, -1, -1):
            m = mats[level]
            e = self.make(level, tuple(self.scale(e, m[r][c]) for r in (0, 1) for c in (0, 1)))
        return e

    def identity(self, n: int) -> Edge:
        return self.kron([_I2] * n)

    def from_gate(self, g: Gate, n: int) -> Edge:
        if max(g.qubits) >= n:
            raise DDError(f"gate {g} out of range for {n} qubits")
        key = (g, n)
        e = self._gate_cache.get(key)
        if e is not None:
            return e
        if g.is_controlled_x:
            mats = [_I2] * n
            for q, p in zip(g.controls, g.polarities):
                mats[q] = _P1 if p else _P0
            mats[g.target] = MATRICES["X"] - _I2
            e = self.add(self.identity(n), self.kron(mats))
        else:
            mats = [_I2] * n
            mats[g.target] = MATRICES[g.kind]
            e = self.kron(mats)
        self._gate_cache[key] = e
        return e

    # -- arithmetic -----------------------------------------------------

    def scale(self, e: Edge, c) -> Edge:
        c = complex(c)
        if self.is_zero(e) or qkey(c) == (0, 0):
            return self.zero
        if self.kind == QMDD:
            return self._clean(Edge(e.weight * c, e.node))
        if c == 1:
            return e
        key = (e.node.id, qkey(c))
        hit = self._scale_cache.get(key)
        if hit is not None:
            return hit
        node = e.node
        if isinstance(node, Terminal):
            out = self.constant(node.value * c)
        else:
            out = self.make(node.level, tuple(self.scale(ch, c) for ch in node.children))
        self._scale_cache[key] = out
        return out

    def add(self, a: Edge, b: Edge) -> Edge:
        if self.is_zero(a):
            return b
        if self.is_zero(b):
            return a
        if a.node.id > b.node.id:
            a, b = b, a
        if self.kind == QMDD:
            if a.node is b.node:
                return self._clean(Edge(a.weight + b.weight, a.node))
            ratio = b.weight / a.weight
            key = (a.node.id, b.node.id, qkey(ratio))
            out = self._add_cache.get(key)
            if out is None:
                out = self._add_nodes(a.node, b.node, ratio)
                self._add_cache[key] = out
            return self.scale(out, a.weight)
        key = (a.node.id, b.node.id)
        out = self._add_cache.get(key)
        if out is None:
            if isinstance(a.node, Terminal) and isinstance(b.node, Terminal):
                out = self.constant(a.node.value + b.node.value)
            else:
                out = self._add_nodes(a.node, b.node, 1)
            self._add_cache[key] = out
        return out

    def _add_nodes(self, a: Node, b: Node, ratio) -> Edge:
        if isinstance(a, Terminal) or isinstance(b, Terminal) or a.level != b.level \
                or len(a.children) != len(b.children):
            raise DDError("cannot add diagrams of different shape")
        children = tuple(
            self.add(ca, self.scale(cb, ratio) if ratio != 1 else cb)
            for ca, cb in zip(a.children, b.children)
        )
        return self.make(a.level, children)

    def multiply(self, m: Edge, v: Edge) -> Edge:
        """Matrix times vector, or matrix times matrix."""
        if self.is_zero(m) or self.is_zero(v):
            return self.zero
        key = (m.node.id, v.node.id)
        out = self._mul_cache.get(key)
        if out is None:
            out = self._mul_nodes(m.node, v.node)
            self._mul_cache[key] = out
        if self.kind == QMDD:
            return self.scale(out, m.weight * v.weight)
        return out

    def _mul_nodes(self, m, v) -> Edge:
        if isinstance(m, Terminal) or isinstance(v, Terminal):
            if not (isinstance(m, Terminal) and isinstance(v, Terminal)):
                raise DDError("operand sizes differ")
            return self.constant(m.value * v.value)
        if not m.is_matrix or m.level != v.level:
            raise DDError("operand sizes differ")
        mc, vc = m.children, v.children
        if v.is_matrix:
            children = [
                self.add(self.multiply(mc[2 * r], vc[k]), self.multiply(mc[2 * r + 1], vc[2 + k]))
                for r in (0, 1) for k in (0, 1)
            ]
        else:
            children = [
                self.add(self.multiply(mc[2 * r], vc[0]), self.multiply(mc[2 * r + 1], vc[1]))
                for r in (0, 1)
            ]
        return self.make(m.level, children)

    # -- readout ----------------------------------------------------------

    def amplitude(self, e: Edge, bits) -> complex:
        w = e.weight
        node = e.node
        for b in bits:
            if node is self.zero_terminal:
                return 0j
            if isinstance(node, Terminal) or node.is_matrix:
                raise DDError("basis string does not match the diagram")
            child = node.children[int(b)]
            w *= child.weight
            node = child.node
        if not isinstance(node, Terminal):
            raise DDError("basis string shorter than the diagram depth")
        return w * node.value

    def entry(self, e: Edge, row: int, col: int, n: int) -> complex:
        w, node = e.weight, e.node
        for level in range(n):
            if node is self.zero_terminal:
                return 0j
            shift = n - 1 - level
            child = node.children[2 * ((row >> shift) & 1) + ((col >> shift) & 1)]
            w *= child.weight
            node = child.node
        return w * node.value

    def depth(self, e: Edge) -> int | None:
        d, node = 0, e.node
        while not isinstance(node, Terminal):
            d += 1
            node = next(c.node for c in node.children if c.node is not self.zero_terminal)
        return None if node is self.zero_terminal else d

    def to_vector(self, e: Edge, n: int | None = None) -> np.ndarray:
        n = self._size(e, n)
        out = np.zeros(2**n, dtype=complex)

        def fill(edge, level, offset, factor):
            if edge.node is self.zero_terminal:
                return
            f = factor * edge.weight
            node = edge.node
            if isinstance(node, Terminal):
                out[offset] = f * node.value
                return
            if node.is_matrix:
                raise DDError("expected a vector diagram")
            half = 2 ** (n - level - 1)
            fill(node.children[0], level + 1, offset, f)
            fill(node.children[1], level + 1, offset + half, f)

        fill(e, 0, 0, 1 + 0j)
        return out

    def to_matrix(self, e: Edge, n: int | None = None) -> np.ndarray:
        n = self._size(e, n)
        out = np.zeros((2**n, 2**n), dtype=complex)

        def fill(edge, level, row, col, factor):
            if edge.node is self.zero_terminal:
                return
            f = factor * edge.weight
            node = edge.node
            if isinstance(node, Terminal):
                out[row, col] = f * node.value
                return
            if not node.is_matrix:
                raise DDError("expected a matrix diagram")
            half = 2 ** (n - level - 1)
            for i, child in enumerate(node.children):
                fill(child, level + 1, row + (i >> 1) * half, col + (i & 1) * half, f)

        fill(e, 0, 0, 0, 1 + 0j)
        return out

    def _size(self, e, n):
        d = self.depth(e)
        if n is None:
            if d is None:
                raise DDError("size of the zero diagram is ambiguous; pass n")
            return d
        if d is not None and d != n:
            raise DDError(f"diagram has {d} levels, not {n}")
        return n

    # -- statistics -------------------------------------------------------

    def nodes(self, e: Edge) -> list:
        seen: dict[int, object] = {}
        stack = [e.node]
        while stack:
            node = stack.pop()
            if node.id in seen:
                continue
            seen[node.id] = node
            stack.extend(c.node for c in node.children)
        return list(seen.values())

    def node_count(self, e: Edge) -> int:
        return sum(1 for nd in self.nodes(e) if not isinstance(nd, Terminal))

    def terminal_count(self, e: Edge) -> int:
        return sum(1 for nd in self.nodes(e) if isinstance(nd, Terminal))

    def is_normalized(self, e: Edge) -> bool:
        """QMDD rule: the leftmost nonzero edge of every node has weight 1."""
        for nd in self.nodes(e):
            if isinstance(nd, Terminal):
                continue
            first = next((c for c in nd.children if c.node is not self.zero_terminal), None)
            if first is None or first.weight != 1:
                return False
        return True

    def approx_equal(self, a: Edge, b: Edge, tol: float = 1e-9) -> bool:
        memo: dict[tuple, bool] = {}

        def eq(x: Edge, y: Edge, fx: complex, fy: complex) -> bool:
            wx, wy = fx * x.weight, fy * y.weight
            zx = x.node is self.zero_terminal or abs(wx) <= tol
            zy = y.node is self.zero_terminal or abs(wy) <= tol
            if zx or zy:
                return _all_small(x, wx, tol) and _all_small(y, wy, tol)
            tx, ty = isinstance(x.node, Terminal), isinstance(y.node, Terminal)
            if tx or ty:
                return tx and ty and abs(wx * x.node.value - wy * y.node.value) <= tol
            key = (x.node.id, y.node.id, qkey(wx), qkey(wy))
            if key not in memo:
                memo[key] = x.node.level == y.node.level and all(
                    eq(cx, cy, wx, wy) for cx, cy in zip(x.node.children, y.node.children)
                )
            return memo[key]

        def _all_small(e: Edge, w: complex, tol: float) -> bool:
            if e.node is self.zero_terminal:
                return True
            if isinstance(e.node, Terminal):
                return abs(w * e.node.value) <= tol
            return all(_all_small(c, w * c.weight, tol) for c in e.node.children)

        return eq(a, b, 1 + 0j, 1 + 0j)

    # -- circuits ---------------------------------------------------------

    def simulate(self, c: Circuit) -> Edge:
        e = self.basis_state("0" * c.n_qubits)
        for g in c.gates:
            e = self.multiply(self.from_gate(g, c.n_qubits), e)
        return e

    def circuit_matrix(self, c: Circuit) -> Edge:
        u = self.identity(c.n_qubits)
        for g in c.gates:
            u = self.multiply(self.from_gate(g, c.n_qubits), u)
        return u


def _log2(length: int) -> int:
    n = int(length).bit_length() - 1
    if length < 2 or 2**n != length:
        raise DDError(f"vector length {length} is not a power of two >= 2")
    return n


# -- module-level API over one shared manager per kind ----------------------

_managers: dict[str, Manager] = {}


def get_manager(kind: str = QMDD) -> Manager:
    kind = kind.upper()
    if kind not in _managers:
        _managers[kind] = Manager(kind)
    return _managers[kind]


def reset_managers():
    _managers.clear()


def _mgr(*edges) -> Manager:
    mgr = edges[0].node.mgr
    mgr.own(*edges)
    return mgr


def dd_from_vector(v, kind: str = QMDD) -> Edge:
    return get_manager(kind).from_vector(v)


def dd_to_vector(e: Edge, n: int | None = None) -> np.ndarray:
    return _mgr(e).to_vector(e, n)


def dd_from_gate(g: Gate, n: int, kind: str = QMDD) -> Edge:
    return get_manager(kind).from_gate(g, n)


def apply(m: Edge, v: Edge) -> Edge:
    mgr = _mgr(m, v)
    if isinstance(m.node, Node) and not m.node.is_matrix:
        raise DDError("first operand must be a matrix diagram")
    return mgr.multiply(m, v)


def add(a: Edge, b: Edge) -> Edge:
    return _mgr(a, b).add(a, b)


def simulate_dd(c: Circuit, kind: str = QMDD) -> Edge:
    return get_manager(kind).simulate(c)


def measure_prob(e: Edge, bits) -> float:
    return abs(_mgr(e).amplitude(e, bits)) ** 2


def node_count(e: Edge) -> int:
    return _mgr(e).node_count(e)


def terminal_count(e: Edge) -> int:
    return _mgr(e).terminal_count(e)


class Verdict(enum.Enum):
    EQUAL = "Equal"
    EQUAL_UP_TO_GLOBAL_FACTOR = "EqualUpToGlobalFactor"
    NOT_EQUAL = "NotEqual"


@dataclass(frozen=True)
class EquivResult:
    verdict: Verdict
    factor: complex | None = None

    def __str__(self):
        if self.verdict is Verdict.EQUAL_UP_TO_GLOBAL_FACTOR:
            f = self.factor
            text = f"{f.real:.12g}" if abs(f.imag) <= 1e-12 else f"{f.real:.12g}{f.imag:+.12g}j"
            return f"{self.verdict.value}({text})"
        return self.verdict.value


def equiv_check(a: Circuit, b: Circuit, kind: str = QMDD, tol: float = 1e-9,
                manager: Manager | None = None) -> EquivResult:
    """Compare circuits by building U_a . U_b^-1 and testing it against c . I."""
    if a.n_qubits != b.n_qubits:
        raise DDError(f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}")
    mgr = manager or get_manager(kind)
    n = a.n_qubits
    w = mgr.multiply(mgr.circuit_matrix(a), mgr.circuit_matrix(inverse(b)))
    factor = mgr.entry(w, 0, 0, n)
    if abs(abs(factor) - 1) > tol:
        return EquivResult(Verdict.NOT_EQUAL)
    target = mgr.scale(mgr.identity(n), factor)
    same = (w.node is target.node and abs(w.weight - target.weight) <= tol) or mgr.approx_equal(w, target, tol)
    if not same:
        return EquivResult(Verdict.NOT_EQUAL)
    if abs(factor - 1) <= tol:
        return EquivResult(Verdict.EQUAL, 1 + 0j)
    return EquivResult(Verdict.EQUAL_UP_TO_GLOBAL_FACTOR, factor)


__all__ = [
    "ADD", "QMDD", "DDError", "Edge", "Manager", "Node", "Terminal", "Verdict", "EquivResult",
    "add", "apply", "dd_from_gate", "dd_from_vector", "dd_to_vector", "equiv_check",
    "get_manager", "measure_prob", "node_count", "reset_managers", "simulate_dd", "terminal_count",
]
