"""Physical circuit description shared by the tableau and Pauli-frame simulators.

Operations are plain tuples:

``("INIT", basis, qubits)``               noiseless |0> (basis "Z") or |+> ("X")
``("BLOCK", level, kind, qubits)``         fresh verified code block ("zero"/"plus")
``("H", qubits)``                          noiseless transversal Hadamards
``("CZ"|"CNOT", a, b, noisy)``             layer of two-qubit gates, pairwise
``("M", basis, qubits, first_record)``     measurements appended to the record
``("CHECK", name, level, records, parity)`` post-selection on a block syndrome
``("VETO", name, level, records, parity)``  like CHECK, but marks the shot as
                                           discarded (a failed fresh-block preparation)
``("FEED", level, records, pauli, qubits)`` byproduct correction by decoded outcome
``("READOUT", name, level, records)``      logical readout, ideally corrected
``("ERR", labels, qubits)``                planted Pauli (one label per qubit)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import steane
from .pauli import PauliString


@dataclass
class OutputBlock:
    name: str
    level: int
    qubits: np.ndarray


@dataclass
class Circuit:
    n_qubits: int = 0
    ops: list = field(default_factory=list)
    n_records: int = 0
    outputs: list[OutputBlock] = field(default_factory=list)
    # logical stabilizers of the ideal output state, one qubit per output block
    target: list[PauliString] = field(default_factory=list)
    check_names: list[str] = field(default_factory=list)
    readout_names: list[str] = field(default_factory=list)
    nodes: dict[str, np.ndarray] = field(default_factory=dict)  # blueprint node -> qubits

    def alloc(self, count: int) -> np.ndarray:
        qs = np.arange(self.n_qubits, self.n_qubits + count)
        self.n_qubits += count
        return qs

    def init(self, basis: str, qubits) -> None:
        self.ops.append(("INIT", basis, np.asarray(qubits)))

    def block(self, level: int, kind: str) -> np.ndarray:
        qs = self.alloc(steane.block_size(level))
        self.ops.append(("BLOCK", level, kind, qs))
        return qs

    def h(self, qubits) -> None:
        self.ops.append(("H", np.asarray(qubits)))

    def two(self, gate: str, a, b, noisy: bool = True) -> None:
        a = np.atleast_1d(np.asarray(a))
        b = np.atleast_1d(np.asarray(b))
        if a.shape != b.shape:
            raise ValueError("gate layer operands differ in size")
        if len(set(a.tolist()) | set(b.tolist())) != 2 * len(a):
            raise ValueError("a gate layer may touch each qubit once")
        self.ops.append((gate, a, b, noisy))

    def measure(self, basis: str, qubits) -> np.ndarray:
        qubits = np.atleast_1d(np.asarray(qubits))
        first = self.n_records
        self.ops.append(("M", basis, qubits, first))
        self.n_records += len(qubits)
        return np.arange(first, first + len(qubits))

    def check(self, name: str, level: int, records, with_parity: bool = False) -> None:
        self.ops.append(("CHECK", name, level, np.asarray(records), with_parity))
        self.check_names.append(name)

    def veto(self, name: str, level: int, records, with_parity: bool = False) -> None:
        self.ops.append(("VETO", name, level, np.asarray(records), with_parity))

    def feed(self, level: int, records, pauli: str, qubits) -> None:
        self.ops.append(("FEED", level, np.asarray(records), pauli, np.asarray(qubits)))

    def readout(self, name: str, level: int, records) -> None:
        self.ops.append(("READOUT", name, level, np.asarray(records)))
        self.readout_names.append(name)

    def plant(self, labels: str, qubits) -> None:
        self.ops.append(("ERR", labels, np.atleast_1d(np.asarray(qubits))))

    def output(self, name: str, level: int, qubits) -> None:
        self.outputs.append(OutputBlock(name, level, np.asarray(qubits)))

    def locations(self) -> list[tuple]:
        """Every fault location as (op_index, kind, position)."""
        locs = []
        for i, op in enumerate(self.ops):
            if op[0] in ("CZ", "CNOT") and op[3]:
                locs += [(i, "pair", k) for k in range(len(op[1]))]
            elif op[0] == "M":
                locs += [(i, "flip", k) for k in range(len(op[2]))]
        return locs


def level1_preparation(which: str, noisy_encoder: bool = True) -> Circuit:
    """Level-1 |0>/|+> from a CZ-graph encoder, verified against two checker blocks.

    |0>: the Z-error check (checker |0>, CNOT checker->data, X readout) runs
    first, then the X-error check (checker |0>, CNOT data->checker, Z readout,
    logical parity included), so no single fault leaves a logical X.
    |+> is the Hadamard dual.
    """
    if which not in ("zero", "plus"):
        raise ValueError(f"unknown preparation {which!r}")
    c = Circuit()
    data, chk_a, chk_b = (c.alloc(7) for _ in range(3))
    for blk, kind in ((data, which), (chk_a, which), (chk_b, which)):
        _encode_physical(c, blk, kind, noisy_encoder)
    if which == "zero":
        c.two("CNOT", chk_a, data)
        rec = c.measure("X", chk_a)
        c.check("prep_z_errors", 1, rec)
        c.two("CNOT", data, chk_b)
        rec = c.measure("Z", chk_b)
        c.check("prep_x_errors", 1, rec, with_parity=True)
    else:
        c.two("CNOT", data, chk_a)
        rec = c.measure("Z", chk_a)
        c.check("prep_x_errors", 1, rec)
        c.two("CNOT", chk_b, data)
        rec = c.measure("X", chk_b)
        c.check("prep_z_errors", 1, rec, with_parity=True)
    c.output("data", 1, data)
    c.target = [PauliString.from_label("Z" if which == "zero" else "X")]
    return c


def _encode_physical(c: Circuit, qubits: np.ndarray, which: str, noisy: bool) -> None:
    c.init("X", qubits)
    for a, b in steane.ENCODER_EDGES:
        c.two("CZ", qubits[a], qubits[b], noisy=noisy)
    c.h(qubits[list(steane.NON_PIVOTS)])
    if which == "plus":
        c.h(qubits)
