"""Strong simulation of quantum circuits by weighted model counting and
decision diagrams, with a statevector reference."""
from __future__ import annotations

from .circuit import (
    CCNOT, CNOT, H, MCX, S, T, X, CapabilityError, Circuit, CircuitError, Gate, ParseError,
    build_cnf_oracle, inverse, lower_ccnot, parse_circuit, random_circuit, read_circuit,
    serialize_circuit, to_clifford_t,
)
from .cnf import WeightedCnf, brute_force_wmc, export_weighted, parse_dimacs, read_dimacs
from .counter import count_models, count_weighted
from .dd import Verdict, equiv_check, measure_prob, node_count, simulate_dd, terminal_count
from .encode_comp import amplitude_wmc, encode_circuit_comp, path_count
from .encode_pauli import encode_circuit_pauli, prob0_pauli
from .statevector import StateVector, simulate

__version__ = "0.1.0"
