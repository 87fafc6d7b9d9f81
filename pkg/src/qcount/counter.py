"""Exact weighted model counting by DPLL search with unit propagation.

No pure-literal rule: dropping a pure variable's other polarity would lose
its weight. Satisfied branches are closed off by multiplying in
``W(v) + W(-v)`` for every still-unassigned variable.
"""
from __future__ import annotations

import math
import sys

from .cnf import WeightedCnf


class _Search:
    def __init__(self, f: WeightedCnf, order: str = "lowest", debug: bool = False):
        self.f = f
        self.n = f.num_vars
        self.clauses = [tuple(dict.fromkeys(cl)) for cl in f.clauses]
        self.order = order
        self.debug = debug
        self.value = [0] * (self.n + 1)  # 0 unassigned, +1 true, -1 false
        self.occ: dict[int, list[int]] = {}
        for ci, cl in enumerate(self.clauses):
            for lit in cl:
                self.occ.setdefault(lit, []).append(ci)
        self.n_sat = [0] * len(self.clauses)
        self.n_false = [0] * len(self.clauses)
        self.unsat_left = len(self.clauses)
        self.trail: list[int] = []
        self.w = [0.0] * (2 * self.n + 1)
        for v in range(1, self.n + 1):
            self.w[v] = f.weight(v)
            self.w[-v] = f.weight(-v)
        self.free_factor = [self.w[v] + self.w[-v] for v in range(self.n + 1)]

    def _assign(self, lit: int, queue: list[int]) -> bool:
        """Set ``lit`` true; returns False on conflict (assignment still recorded)."""
        self.value[abs(lit)] = 1 if lit > 0 else -1
        self.trail.append(lit)
        for ci in self.occ.get(lit, ()):
            self.n_sat[ci] += 1
            if self.n_sat[ci] == 1:
                self.unsat_left -= 1
        ok = True
        for ci in self.occ.get(-lit, ()):
            self.n_false[ci] += 1
            if self.n_sat[ci]:
                continue
            size = len(self.clauses[ci])
            if self.n_false[ci] == size:
                ok = False
            elif self.n_false[ci] == size - 1:
                for other in self.clauses[ci]:
                    if self.value[abs(other)] == 0:
                        queue.append(other)
                        break
        return ok

    def _undo(self, mark: int):
        while len(self.trail) > mark:
            lit = self.trail.pop()
            self.value[abs(lit)] = 0
            for ci in self.occ.get(lit, ()):
                self.n_sat[ci] -= 1
                if self.n_sat[ci] == 0:
                    self.unsat_left += 1
            for ci in self.occ.get(-lit, ()):
                self.n_false[ci] -= 1

    def _propagate(self, queue: list[int]) -> tuple[bool, float]:
        """Assign queued literals to fixpoint; returns (ok, weight of new literals)."""
        weight = 1.0
        while queue:
            lit = queue.pop()
            val = self.value[abs(lit)]
            if val:
                if (val > 0) != (lit > 0):
                    return False, 0.0
                continue
            weight *= self.w[lit]
            if not self._assign(lit, queue):
                return False, 0.0
        return True, weight

    def _pick(self) -> int:
        variables = range(1, self.n + 1) if self.order == "lowest" else range(self.n, 0, -1)
        for v in variables:
            if self.value[v]:
                continue
            for lit in (v, -v):
                for ci in self.occ.get(lit, ()):
                    if not self.n_sat[ci]:
                        return v
        raise AssertionError("no branch variable although clauses remain unsatisfied")

    def _closure(self) -> float:
        out = 1.0
        for v in range(1, self.n + 1):
            if not self.value[v]:
                out *= self.free_factor[v]
        return out

    def _check_weight(self, weight: float):
        expected = math.prod(self.w[lit] for lit in self.trail)
        assert math.isclose(weight, expected, rel_tol=1e-9, abs_tol=1e-300), (weight, expected)

    def count(self, weight: float) -> float:
        if self.debug:
            self._check_weight(weight)
        if self.unsat_left == 0:
            return weight * self._closure()
        v = self._pick()
        total = 0.0
        for lit in (v, -v):
            mark = len(self.trail)
            ok, w = self._propagate([lit])
            if ok and w != 0.0:
                total += self.count(weight * w)
            self._undo(mark)
        return total

    def run(self) -> float:
        if any(len(cl) == 0 for cl in self.clauses):
            return 0.0
        units = [cl[0] for cl in self.clauses if len(cl) == 1]
        ok, w = self._propagate(units)
        if not ok:
            return 0.0
        return self.count(w)


def count_weighted(f: WeightedCnf, order: str = "lowest", debug: bool = False) -> float:
    """Weighted model count of ``f``.

    ``order`` selects the branching variable among those in unsatisfied
    clauses: ``"lowest"`` (default) or ``"highest"`` index first. The result
    does not depend on it up to rounding.
    """
    if order not in ("lowest", "highest"):
        raise ValueError(f"unknown branch order {order!r}")
    search = _Search(f, order, debug)
    limit = sys.getrecursionlimit()
    need = 2 * f.num_vars + 100
    if need > limit:
        sys.setrecursionlimit(need)
    return search.run()


def count_models(f: WeightedCnf) -> int:
    return round(count_weighted(f.unweighted()))
