"""Single-trial execution of a circuit on the stabilizer tableau."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import steane
from .circuit import Circuit
from .pauli import NoiseModel, PauliString, sample_two_qubit_error
from .tableau import StabilizerState

# (level, kind, rng) -> Pauli error on the fresh block, or None
BlockNoise = Callable[[int, str, np.random.Generator], PauliString | None]


@dataclass
class VerificationOutcome:
    accepted: bool
    failed_checkpoint: str | None = None
    residual_frame: PauliString | None = None  # frame restricted to the output qubits
    state: StabilizerState | None = None
    readouts: dict[str, int] = field(default_factory=dict)
    syndromes: dict[str, steane.Syndrome] = field(default_factory=dict)  # top-level, per checkpoint

    def __post_init__(self):
        if self.accepted and self.failed_checkpoint is not None:
            raise ValueError("an accepted outcome has no failed checkpoint")


def run_tableau(circuit: Circuit, model: NoiseModel | None, rng: np.random.Generator,
                block_noise: BlockNoise | None = None, abort_on_reject: bool = True) -> VerificationOutcome:
    """Run one trial.  Noise goes into the Pauli frame after each ideal gate."""
    model = model or NoiseModel(0.0)
    state = StabilizerState(circuit.n_qubits)
    bits = np.zeros(circuit.n_records, dtype=np.uint8)
    basis_of = np.zeros(circuit.n_records, dtype="<U1")
    failed = None
    readouts = {}
    syndromes = {}
    for op in circuit.ops:
        kind = op[0]
        if kind == "INIT":
            if op[1] == "X":
                for q in op[2]:
                    state.apply("H", int(q))
        elif kind == "BLOCK":
            _, level, which, qs = op
            for gate, *targets in steane.encoder_ops(tuple(int(q) for q in qs), level, which):
                state.apply(gate, *targets)
            if block_noise is not None:
                err = block_noise(level, which, rng)
                if err is not None:
                    state.apply_error(err, tuple(int(q) for q in qs))
        elif kind == "H":
            for q in op[1]:
                state.apply("H", int(q))
        elif kind in ("CZ", "CNOT"):
            _, a, b, noisy = op
            for qa, qb in zip(a, b):
                state.apply(kind, int(qa), int(qb))
                if noisy and model.pair_total() > 0:
                    err = sample_two_qubit_error(model, rng)
                    if not err.is_identity():
                        state.apply_error(err, (int(qa), int(qb)))
        elif kind == "M":
            _, basis, qs, first = op
            basis_of[first:first + len(qs)] = basis
            for k, q in enumerate(qs):
                outcome = state.measure_qubit(int(q), basis, rng)
                flip = model.p_M > 0 and rng.random() < model.p_M
                bits[first + k] = (outcome == -1) ^ flip
        elif kind in ("CHECK", "VETO"):
            _, name, level, rec, with_parity = op
            if level >= 1:
                s = tuple(int(v) for v in steane.syndrome_bits(steane.decode_below_top(bits[rec], level)))
                clean = (0, 0, 0)
                syndromes[name] = (steane.Syndrome(s, clean) if basis_of[rec[0]] == "X"
                                   else steane.Syndrome(clean, s))
            if steane.top_check(bits[rec], level, with_parity):
                failed = failed or name
                if abort_on_reject:
                    return VerificationOutcome(False, failed, None, state, readouts, syndromes)
        elif kind == "FEED":
            _, level, rec, pauli, qs = op
            if steane.detect_only_logical(bits[rec], level):
                for q in qs:
                    state.apply(pauli, int(q))
        elif kind == "READOUT":
            _, name, level, rec = op
            readouts[name] = int(steane.corrected_logical(bits[rec], level))
        elif kind == "ERR":
            _, labels, qs = op
            err = PauliString.from_label("".join(labels))
            state.apply_error(err, tuple(int(q) for q in qs))
        else:
            raise ValueError(f"unknown op {kind!r}")
    out_qubits = [int(q) for blk in circuit.outputs for q in blk.qubits]
    residual = state.pauli_frame.restrict(out_qubits) if out_qubits else None
    return VerificationOutcome(failed is None, failed, residual, state, readouts, syndromes)


def stabilizers_on(state: StabilizerState, qubits: list[int]) -> list[PauliString]:
    """Signed generators of the stabilizer subgroup supported on ``qubits``,
    expressed on those qubits (in the given order)."""
    n = state.n_qubits
    keep = set(qubits)
    rows = list(state.stabilizers)
    outside = [q for q in range(n) if q not in keep]
    pivot_row = 0
    for q in outside:
        for bit in ("x", "z"):
            piv = None
            for i in range(pivot_row, len(rows)):
                mask = rows[i].x_mask if bit == "x" else rows[i].z_mask
                if (mask >> q) & 1:
                    piv = i
                    break
            if piv is None:
                continue
            rows[pivot_row], rows[piv] = rows[piv], rows[pivot_row]
            for i in range(len(rows)):
                mask = rows[i].x_mask if bit == "x" else rows[i].z_mask
                if i != pivot_row and (mask >> q) & 1:
                    rows[i] = rows[i] * rows[pivot_row]
            pivot_row += 1
    result = []
    for r in rows[pivot_row:]:
        sub = r.restrict(qubits)
        result.append(PauliString(sub.n_qubits, sub.x_mask, sub.z_mask, r.phase))
    return result


def lift_logical(p: PauliString, circuit: Circuit) -> PauliString:
    """Map a Pauli on output blocks (one qubit each) to transversal physical operators."""
    total = PauliString(circuit.n_qubits)
    for k, blk in enumerate(circuit.outputs):
        label = p.label_at(k)
        if label == "I":
            continue
        if label == "Y":
            # transversal X then Z: X^n Z^n = (-i)^n Y^n, fix the phase below
            total = total * PauliString.on(circuit.n_qubits, blk.qubits.tolist(), "X")
            total = total * PauliString.on(circuit.n_qubits, blk.qubits.tolist(), "Z")
            total = total * PauliString(circuit.n_qubits, 0, 0, 1)  # logical Y = i X Z
        else:
            total = total * PauliString.on(circuit.n_qubits, blk.qubits.tolist(), label)
    return total * PauliString(circuit.n_qubits, 0, 0, p.phase)


def logical_expectations(outcome: VerificationOutcome, circuit: Circuit,
                         paulis: list[PauliString] | None = None) -> list[int]:
    """Expectation (+1/-1/0) of logical Paulis on the output, frame included."""
    paulis = circuit.target if paulis is None else paulis
    state = outcome.state
    out = []
    for p in paulis:
        phys = lift_logical(p, circuit)
        if phys.phase % 2:
            raise ValueError("logical observable is not Hermitian")
        value = state.peek(phys)
        if value and not state.pauli_frame.commutes(phys):
            value = -value
        out.append(value)
    return out
