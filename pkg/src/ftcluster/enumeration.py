"""Exhaustive fault-path enumeration: an independent oracle for the Monte Carlo engine.

Fresh level-1 blocks are flattened into their verification circuits, so a
failed preparation becomes a discarded shot instead of a gadget rejection.
Every single fault (and, at second order, every pair of faults at distinct
locations) is injected deterministically into the Pauli-frame simulator.

With per-location fault probability ``P_l`` and per-fault weight
``w = p / (1 - P_l)``, any event probability is ``prod(1 - P_l)`` times
``Z[X] = sum_F w^F X(F)``.  Acceptance uses the cluster expansion

    log Z[X] ~ sum_l log(1 + sum_t w_lt X_lt) + sum_{i<j} w_i w_j (X_ij - X_i X_j)

which is exact for independent faults and drops only connected terms of third
order.  The conditional logical error is ``sum w_i E_i + sum w_i w_j E_ij``.
A distance-3 gadget has no single-fault logical error, so the pair term is its
leading contribution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import framesim as fs
from .circuit import Circuit, level1_preparation
from .pauli import NoiseModel


def flatten(circuit: Circuit) -> Circuit:
    """Inline a verified preparation for every fresh level-1 block."""
    flat = Circuit(n_qubits=circuit.n_qubits)
    flat.outputs = circuit.outputs
    flat.target = circuit.target
    flat.nodes = circuit.nodes
    rec_map = np.zeros(circuit.n_records, dtype=np.int64)
    for op in circuit.ops:
        kind = op[0]
        if kind == "BLOCK" and op[1] >= 1:
            if op[1] > 1:
                raise ValueError("enumeration supports gadgets on blocks of level <= 1")
            _inline_preparation(flat, op[2], op[3])
        elif kind == "M":
            _, basis, qs, first = op
            rec_map[first:first + len(qs)] = flat.measure(basis, qs)
        elif kind == "CHECK":
            _, name, level, rec, parity = op
            flat.check(name, level, rec_map[rec], parity)
        elif kind == "VETO":
            _, name, level, rec, parity = op
            flat.veto(name, level, rec_map[rec], parity)
        elif kind == "FEED":
            _, level, rec, pauli, qs = op
            flat.feed(level, rec_map[rec], pauli, qs)
        elif kind == "READOUT":
            _, name, level, rec = op
            flat.readout(name, level, rec_map[rec])
        else:
            flat.ops.append(op)
    return flat


def _inline_preparation(flat: Circuit, kind: str, data: np.ndarray) -> None:
    prep = level1_preparation(kind)
    qmap = np.concatenate([data, flat.alloc(prep.n_qubits - len(data))])
    rmap = np.zeros(prep.n_records, dtype=np.int64)
    for op in prep.ops:
        k = op[0]
        if k == "INIT":
            flat.init(op[1], qmap[op[2]])
        elif k == "H":
            flat.h(qmap[op[1]])
        elif k in ("CZ", "CNOT"):
            flat.two(k, qmap[op[1]], qmap[op[2]], op[3])
        elif k == "M":
            _, basis, qs, first = op
            rmap[first:first + len(qs)] = flat.measure(basis, qmap[qs])
        elif k == "CHECK":
            _, name, level, rec, parity = op
            flat.veto(f"prep:{name}", level, rmap[rec], parity)
        else:
            raise ValueError(f"unexpected op {k} in a preparation circuit")


@dataclass
class FaultEvents:
    op: np.ndarray  # op index
    pos: np.ndarray  # pair / measurement position within the op
    kind: np.ndarray  # PAIR_LABELS index, or -1 for a measurement flip
    loc: np.ndarray  # location id (events at one location are exclusive)
    weight: np.ndarray  # p / (1 - P_location)
    loc_total: np.ndarray  # P_location per location id

    def __len__(self) -> int:
        return len(self.op)


def fault_events(circuit: Circuit, model: NoiseModel) -> FaultEvents:
    pair_p = model.pair_probabilities()
    pair_total = model.pair_total()
    ops, pos, kind, loc, w, totals = [], [], [], [], [], []
    for lid, (i, what, k) in enumerate(circuit.locations()):
        if what == "pair":
            total = pair_total
            for t in range(15):
                if pair_p[t] > 0:
                    ops.append(i), pos.append(k), kind.append(t), loc.append(lid)
                    w.append(pair_p[t] / (1 - total))
        else:
            total = model.p_M
            if total > 0:
                ops.append(i), pos.append(k), kind.append(-1), loc.append(lid)
                w.append(total / (1 - total))
        totals.append(total)
    as_int = lambda v: np.asarray(v, dtype=np.int64)  # noqa: E731
    return FaultEvents(as_int(ops), as_int(pos), as_int(kind), as_int(loc),
                       np.asarray(w, dtype=float), np.asarray(totals, dtype=float))


def _simulate(circuit: Circuit, events: FaultEvents, groups: list[np.ndarray]):
    """Run one shot per row of ``groups`` (event ids per shot); return flag bits."""
    shots = len(groups[0])
    ev = np.concatenate(groups)
    sh = np.concatenate([np.arange(shots)] * len(groups))
    order = np.argsort(events.op[ev], kind="stable")
    ev, sh = ev[order], sh[order]
    faults = {}
    ops = events.op[ev]
    bounds = np.flatnonzero(np.diff(ops)) + 1
    for e_chunk, s_chunk in zip(np.split(ev, bounds), np.split(sh, bounds)):
        if len(e_chunk):
            faults[int(events.op[e_chunk[0]])] = (events.pos[e_chunk], s_chunk,
                                                  np.maximum(events.kind[e_chunk], 0))
    res = fs.run_frames(circuit, NoiseModel(0.0), shots, np.random.default_rng(0), faults=faults)
    kept = fs.unpack(~res.discarded, shots)
    accepted = fs.unpack(res.accepted, shots)
    error = fs.unpack(res.logical_error, shots) & accepted
    return kept.astype(float), accepted.astype(float), error.astype(float)


@dataclass
class OracleResult:
    acceptance: float
    conditional_error: float
    order: int
    n_events: int
    n_pairs: int
    first_order_acceptance: float
    first_order_error: float


def enumerate_faults(circuit: Circuit, model: NoiseModel, order: int = 2,
                     chunk: int = 1 << 16) -> OracleResult:
    """Acceptance and conditional logical error from fault-path enumeration."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    flat = flatten(circuit)
    ev = fault_events(flat, model)
    n = len(ev)
    if n == 0:
        return OracleResult(1.0, 0.0, order, 0, 0, 1.0, 0.0)
    kept1, acc1, err1 = _simulate(flat, ev, [np.arange(n)])

    def log_z_singles(flags):
        per_loc = np.bincount(ev.loc, weights=ev.weight * flags, minlength=len(ev.loc_total))
        return float(np.log1p(per_loc).sum())

    log_kept = log_z_singles(kept1)
    log_acc = log_z_singles(acc1)
    err_sum = float((ev.weight * err1).sum())
    first_acc = float(np.exp(log_acc - log_kept))
    first_err = err_sum
    n_pairs = 0
    if order == 2:
        i_all, j_all = np.triu_indices(n, k=1)
        distinct = ev.loc[i_all] != ev.loc[j_all]
        i_all, j_all = i_all[distinct], j_all[distinct]
        n_pairs = len(i_all)
        for start in range(0, n_pairs, chunk):
            i = i_all[start:start + chunk]
            j = j_all[start:start + chunk]
            kept, acc, err = _simulate(flat, ev, [i, j])
            ww = ev.weight[i] * ev.weight[j]
            log_kept += float((ww * (kept - kept1[i] * kept1[j])).sum())
            log_acc += float((ww * (acc - acc1[i] * acc1[j])).sum())
            err_sum += float((ww * err).sum())
    return OracleResult(
        acceptance=float(np.exp(log_acc - log_kept)),
        conditional_error=err_sum,
        order=order,
        n_events=n,
        n_pairs=n_pairs,
        first_order_acceptance=first_acc,
        first_order_error=first_err,
    )


def single_fault_report(circuit: Circuit, model: NoiseModel | None = None) -> dict[str, int]:
    """Classify every single fault: discarded, rejected, harmless or logical."""
    model = model or NoiseModel(0.01)
    flat = flatten(circuit)
    ev = fault_events(flat, model)
    kept, acc, err = (f.astype(bool) for f in _simulate(flat, ev, [np.arange(len(ev))]))
    return {
        "events": len(ev),
        "discarded": int((~kept).sum()),
        "rejected": int((kept & ~acc).sum()),
        "harmless": int((acc & ~err).sum()),
        "logical": int(err.sum()),
    }
