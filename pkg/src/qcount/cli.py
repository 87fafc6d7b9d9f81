"""Command-line front end: simulate, encode, count, check, compare circuits.

Exit codes: 0 ok, 1 parse/input error, 2 unsupported gate/backend
combination, 3 equal up to a global factor, 4 not equal, 5 failed check.
"""
from __future__ import annotations

import argparse
import itertools
import os
import sys
import time
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import dd, encode_comp, encode_pauli
from .circuit import (
    CLIFFORD_T, FULL, TOFFOLI_H, CapabilityError, Circuit, CircuitError, ParseError,
    build_cnf_oracle, random_circuit, read_circuit, serialize_circuit, to_clifford_t,
)
from .cnf import DimacsError, export_weighted, read_dimacs
from .counter import count_weighted
from .statevector import amplitude, index_to_bits, marginal_prob0, probabilities, simulate

BACKENDS = ("sv", "wmc", "pauli", "add", "qmdd")
ALL_LIMIT = 16
WMC_DISTRIBUTION_LIMIT = 10
CHECK_TOL = 1e-9
GATE_SETS = {"toffoli-h": TOFFOLI_H, "clifford-t": CLIFFORD_T, "full": FULL}

EXIT_OK, EXIT_PARSE, EXIT_CAPABILITY, EXIT_GLOBAL_FACTOR, EXIT_NOT_EQUAL, EXIT_CHECK_FAILED = 0, 1, 2, 3, 4, 5


def fixture_path(name: str) -> str:
    return str(resources.files("qcount") / "fixtures" / name)


def resolve(path: str) -> str:
    """``path`` itself, or the bundled fixture with the same file name."""
    if os.path.exists(path):
        return path
    bundled = fixture_path(os.path.basename(path))
    return bundled if os.path.exists(bundled) else path


def fmt(x) -> str:
    x = complex(x)
    if abs(x.imag) <= 1e-15:
        return format(x.real, ".12g")
    return f"{x.real:.12g}{x.imag:+.12g}j"


def notice(msg: str):
    print(f"notice: {msg}", file=sys.stderr)


def for_pauli(c: Circuit) -> Circuit:
    """Lower to Clifford+T, announcing it when anything changed."""
    lowered = to_clifford_t(c)
    if lowered is not c and lowered.gates != c.gates:
        notice(f"lowered {c.n_qubits}-qubit circuit to Clifford+T ({len(lowered.gates)} gates)")
    return lowered


def _check_bits(bits: str, n: int) -> str:
    if len(bits) != n or set(bits) - {"0", "1"}:
        raise ValueError(f"expected a {n}-bit string, got {bits!r}")
    return bits


def _all_bits(n: int):
    return ("".join(b) for b in itertools.product("01", repeat=n))


# -- backends -----------------------------------------------------------------

def distribution(c: Circuit, backend: str) -> np.ndarray:
    """All 2^n outcome probabilities (not available for the pauli backend)."""
    if backend == "sv":
        return probabilities(simulate(c))
    if backend in ("add", "qmdd"):
        mgr = dd.Manager(backend.upper())
        return np.abs(mgr.to_vector(mgr.simulate(c), c.n_qubits)) ** 2
    if backend == "wmc":
        f, reg = encode_comp.encode_circuit_comp(c)
        amps = [count_weighted(f.with_units(encode_comp.basis_units(reg.final, b))) for b in _all_bits(c.n_qubits)]
        return np.array(amps) ** 2
    raise CapabilityError(f"backend {backend} cannot produce a full distribution")


def sim_value(c: Circuit, backend: str, query: str, arg):
    n = c.n_qubits
    if backend == "pauli":
        if query != "prob0":
            raise CapabilityError("pauli backend answers --prob0 only")
        return encode_pauli.prob0_pauli(for_pauli(c), arg)
    if query == "all":
        if n > ALL_LIMIT:
            raise ValueError(f"--all is limited to {ALL_LIMIT} qubits")
        return distribution(c, backend)
    if query == "prob0":
        if not 0 <= arg < n:
            raise ValueError(f"qubit {arg} out of range")
        if backend == "sv":
            return marginal_prob0(simulate(c), arg)
        if n > ALL_LIMIT:
            raise ValueError(f"marginals are limited to {ALL_LIMIT} qubits on this backend")
        p = distribution(c, backend).reshape((2,) * n)
        return float(np.take(p, 0, axis=arg).sum())
    bits = _check_bits(arg, n)
    if backend == "sv":
        amp = amplitude(simulate(c), bits)
    elif backend == "wmc":
        amp = encode_comp.amplitude_wmc(c, bits)
    else:
        mgr = dd.Manager(backend.upper())
        amp = mgr.amplitude(mgr.simulate(c), bits)
    return amp if query == "amplitude" else abs(amp) ** 2


# -- check ----------------------------------------------------------------------

@dataclass
class CheckReport:
    backends: list[str] = field(default_factory=list)
    deviations: dict[tuple[str, str], float] = field(default_factory=dict)
    skipped: dict[str, str] = field(default_factory=dict)

    @property
    def max_deviation(self) -> float:
        return max(self.deviations.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_deviation <= CHECK_TOL

    def lines(self) -> list[str]:
        out = [f"backends: {' '.join(self.backends)}"]
        out += [f"skipped {b}: {why}" for b, why in self.skipped.items()]
        out += [f"{a} vs {b}: max deviation {d:.3e}" for (a, b), d in self.deviations.items()]
        out.append(f"max deviation: {self.max_deviation:.3e}")
        out.append("PASS" if self.passed else "FAIL")
        return out


def run_check(c: Circuit) -> CheckReport:
    report = CheckReport()
    dists: dict[str, np.ndarray] = {}
    for backend in ("sv", "add", "qmdd", "wmc"):
        if backend == "wmc":
            bad = c.kinds() - encode_comp.SUPPORTED
            if bad:
                report.skipped[backend] = f"gates {sorted(bad)} outside Toffoli+H"
                continue
            if c.n_qubits > WMC_DISTRIBUTION_LIMIT:
                report.skipped[backend] = f"more than {WMC_DISTRIBUTION_LIMIT} qubits"
                continue
        dists[backend] = distribution(c, backend)
        report.backends.append(backend)
    for a, b in itertools.combinations(dists, 2):
        report.deviations[(a, b)] = float(np.abs(dists[a] - dists[b]).max())
    try:
        lowered = to_clifford_t(c)
    except CapabilityError as exc:
        report.skipped["pauli"] = str(exc)
    else:
        p0 = np.array([encode_pauli.prob0_pauli(lowered, q) for q in range(c.n_qubits)])
        report.backends.append("pauli")
        n = c.n_qubits
        for name, p in dists.items():
            ref = np.array([np.take(p.reshape((2,) * n), 0, axis=q).sum() for q in range(n)])
            report.deviations[(name, "pauli")] = float(np.abs(ref - p0).max())
    return report


# -- commands -------------------------------------------------------------------

def _load(path) -> Circuit:
    return read_circuit(resolve(path))


def cmd_sim(args) -> int:
    c = _load(args.file)
    if args.amplitude is not None:
        query, arg = "amplitude", args.amplitude
    elif args.prob is not None:
        query, arg = "prob", args.prob
    elif args.prob0 is not None:
        query, arg = "prob0", args.prob0
    else:
        query, arg = "all", None
    value = sim_value(c, args.backend, query, arg)
    if query == "all":
        for i, p in enumerate(value):
            print(index_to_bits(i, c.n_qubits), fmt(p))
    else:
        print(fmt(value))
    return EXIT_OK


def cmd_encode(args) -> int:
    c = _load(args.file)
    if args.basis == "comp":
        f, reg = encode_comp.encode_circuit_comp(c)
        if args.measure is not None:
            f = f.with_units(encode_comp.basis_units(reg.final, _check_bits(args.measure, c.n_qubits)))
    else:
        enc = encode_pauli.encode_circuit_pauli(for_pauli(c))
        f = enc.formula()
        if args.measure is not None:
            m = args.measure
            pauli = encode_pauli.z_observable(c.n_qubits, int(m)) if m.isdigit() else m
            f = f.with_units(enc.observable_units(pauli))
    text = export_weighted(f)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_check(args) -> int:
    if args.file:
        c = _load(args.file)
    else:
        c = random_circuit(args.qubits, args.gates, GATE_SETS[args.gate_set], args.random_seed)
        print(f"circuit: seed={args.random_seed} qubits={args.qubits} gates={args.gates} set={args.gate_set}")
    report = run_check(c)
    print("\n".join(report.lines()))
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_oracle(args) -> int:
    text = serialize_circuit(build_cnf_oracle(read_dimacs(resolve(args.dimacs))))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_count(args) -> int:
    print(fmt(count_weighted(read_dimacs(resolve(args.cnf)))))
    return EXIT_OK


def cmd_equiv(args) -> int:
    result = dd.equiv_check(_load(args.a), _load(args.b), manager=dd.Manager(args.kind.upper()))
    print(result)
    return {
        dd.Verdict.EQUAL: EXIT_OK,
        dd.Verdict.EQUAL_UP_TO_GLOBAL_FACTOR: EXIT_GLOBAL_FACTOR,
        dd.Verdict.NOT_EQUAL: EXIT_NOT_EQUAL,
    }[result.verdict]


def cmd_stats(args) -> int:
    for path in args.files:
        c = _load(path)
        mgr = dd.Manager(args.kind.upper())
        e = mgr.circuit_matrix(c) if args.unitary else mgr.simulate(c)
        print(f"kind={mgr.kind} nodes={mgr.node_count(e)} terminals={mgr.terminal_count(e)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qcount", description="Quantum circuit simulation by counting and decision diagrams.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sim", help="simulate a circuit and read out one quantity")
    s.add_argument("file")
    s.add_argument("--backend", choices=BACKENDS, default="sv")
    q = s.add_mutually_exclusive_group(required=True)
    q.add_argument("--amplitude", metavar="BITS")
    q.add_argument("--prob", metavar="BITS")
    q.add_argument("--prob0", metavar="Q", type=int)
    q.add_argument("--all", action="store_true")
    s.set_defaults(func=cmd_sim)

    s = sub.add_parser("encode", help="write the weighted CNF of a circuit")
    s.add_argument("file")
    s.add_argument("--basis", choices=("comp", "pauli"), default="comp")
    s.add_argument("--measure", help="basis string (comp) or qubit index / Pauli string (pauli)")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_encode)

    s = sub.add_parser("check", help="cross-check all applicable backends")
    s.add_argument("file", nargs="?")
    s.add_argument("--random-seed", type=int, default=0)
    s.add_argument("--qubits", type=int, default=4)
    s.add_argument("--gates", type=int, default=10)
    s.add_argument("--gate-set", choices=sorted(GATE_SETS), default="toffoli-h")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("oracle", help="compile a DIMACS CNF into an oracle circuit")
    s.add_argument("dimacs")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("count", help="weighted model count of a DIMACS file")
    s.add_argument("cnf")
    s.set_defaults(func=cmd_count)

    s = sub.add_parser("equiv", help="decide whether two circuits implement the same unitary")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--kind", choices=("add", "qmdd", "ADD", "QMDD"), default="qmdd")
    s.set_defaults(func=cmd_equiv)

    s = sub.add_parser("stats", help="decision-diagram size of the output state")
    s.add_argument("files", nargs="+")
    s.add_argument("--kind", choices=("add", "qmdd", "ADD", "QMDD"), default="qmdd")
    s.add_argument("--unitary", action="store_true", help="measure the circuit's matrix instead")
    s.set_defaults(func=cmd_stats)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        code = args.func(args)
    except (ParseError, DimacsError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except (CircuitError, dd.DDError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    print(f"wall time: {time.perf_counter() - start:.4f} s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
