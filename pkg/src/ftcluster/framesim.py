"""Batch Pauli-frame simulation, 64 shots per uint64 word.

Only the deviation from a noiseless reference run is tracked.  Every verified
block measurement has a deterministic clean syndrome in the reference run, so
checks, feed-forward and logical readouts can be evaluated on flip bits alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import steane
from .circuit import Circuit
from .pauli import PAIR_LABELS, NoiseModel

BlockSource = Callable[[int, str, int, np.random.Generator], tuple[np.ndarray, np.ndarray]]

_ONE = np.uint64(1)
_PAIR_BITS = np.array(
    [[ch in "XY", ch in "ZY"] for label in PAIR_LABELS for ch in label], dtype=bool
).reshape(15, 2, 2)  # [type, qubit a/b, x/z]


def n_words(shots: int) -> int:
    return (shots + 63) // 64


def valid_mask(shots: int) -> np.ndarray:
    w = np.full(n_words(shots), np.uint64(0xFFFFFFFFFFFFFFFF), dtype=np.uint64)
    rem = shots % 64
    if rem:
        w[-1] = np.uint64((1 << rem) - 1)
    return w


def pack(bits: np.ndarray) -> np.ndarray:
    """Pack bools along the last axis (shot k -> word k//64, bit k%64)."""
    bits = np.asarray(bits, dtype=bool)
    shots = bits.shape[-1]
    pad = n_words(shots) * 64 - shots
    if pad:
        bits = np.concatenate([bits, np.zeros(bits.shape[:-1] + (pad,), dtype=bool)], axis=-1)
    as_bytes = np.packbits(bits, axis=-1, bitorder="little")
    return np.ascontiguousarray(as_bytes).view(np.uint64)


def unpack(words: np.ndarray, shots: int) -> np.ndarray:
    words = np.ascontiguousarray(words, dtype=np.uint64)
    bits = np.unpackbits(words.view(np.uint8), axis=-1, bitorder="little")
    return bits[..., :shots].astype(bool)


def popcount(words: np.ndarray) -> int:
    return int(np.bitwise_count(words).sum())


def bernoulli_positions(total: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Sorted indices in ``range(total)`` each selected independently with prob ``p``."""
    if p <= 0 or total <= 0:
        return np.zeros(0, dtype=np.int64)
    if p >= 1:
        return np.arange(total, dtype=np.int64)
    out = []
    start = -1
    expected = int(total * p * 1.1) + 16
    while True:
        gaps = rng.geometric(p, size=expected)
        pos = start + np.cumsum(gaps)
        if pos[-1] >= total:
            out.append(pos[pos < total])
            break
        out.append(pos)
        start = int(pos[-1])
        expected = max(16, int((total - start) * p * 1.1) + 16)
    return np.concatenate(out).astype(np.int64)


def _xor_bits(arr: np.ndarray, rows: np.ndarray, shots_idx: np.ndarray) -> None:
    if len(rows) == 0:
        return
    bits = np.left_shift(_ONE, (shots_idx & 63).astype(np.uint64))
    np.bitwise_xor.at(arr, (rows, shots_idx >> 6), bits)


def sample_iid_errors(n_qubits: int, shots: int, eps: tuple[float, float, float],
                      rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Independent X/Y/Z errors with probabilities ``eps`` on every qubit."""
    x = np.zeros((n_qubits, n_words(shots)), dtype=np.uint64)
    z = np.zeros_like(x)
    total = float(sum(eps))
    pos = bernoulli_positions(n_qubits * shots, total, rng)
    if len(pos):
        kind = rng.choice(3, size=len(pos), p=np.asarray(eps) / total)
        rows, sh = pos // shots, pos % shots
        has_x = kind <= 1  # X or Y
        has_z = kind >= 1  # Y or Z
        _xor_bits(x, rows[has_x], sh[has_x])
        _xor_bits(z, rows[has_z], sh[has_z])
    return x, z


@dataclass
class FrameResult:
    shots: int
    rejected: np.ndarray  # packed: any check fired
    discarded: np.ndarray  # packed: a fresh-block preparation failed (VETO)
    logical_error: np.ndarray  # packed: output state or readout wrong
    frame_error: np.ndarray  # packed: residual output frame outside the target group
    output_lx: np.ndarray  # (n_outputs, words) decoded logical X flips
    output_lz: np.ndarray
    readouts: np.ndarray  # (n_readouts, words)
    check_fired: dict[str, int] = field(default_factory=dict)
    x: np.ndarray | None = None
    z: np.ndarray | None = None

    @property
    def accepted(self) -> np.ndarray:
        return ~self.rejected & ~self.discarded & valid_mask(self.shots)

    def accept_count(self) -> int:
        return popcount(self.accepted)

    def error_count(self) -> int:
        return popcount(self.accepted & self.logical_error)


def _zero_source(level, kind, shots, rng):
    size = steane.block_size(level)
    w = np.zeros((size, n_words(shots)), dtype=np.uint64)
    return w, w.copy()


# Injected faults: op index -> (position, shot, type) arrays; type is a
# PAIR_LABELS index for two-qubit layers and ignored for measurements.
Faults = dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]]


def _inject_pairs(x, z, a, b, pair, sh, t):
    bits = _PAIR_BITS[t]
    for side, qarr in ((0, a), (1, b)):
        rows = qarr[pair]
        sel = bits[:, side, 0]
        _xor_bits(x, rows[sel], sh[sel])
        sel = bits[:, side, 1]
        _xor_bits(z, rows[sel], sh[sel])


def run_frames(circuit: Circuit, model: NoiseModel, shots: int, rng: np.random.Generator,
               source: BlockSource | None = None, keep_frames: bool = False,
               faults: Faults | None = None) -> FrameResult:
    source = source or _zero_source
    faults = faults or {}
    W = n_words(shots)
    mask = valid_mask(shots)
    x = np.zeros((circuit.n_qubits, W), dtype=np.uint64)
    z = np.zeros_like(x)
    records = np.zeros((circuit.n_records, W), dtype=np.uint64)
    rejected = np.zeros(W, dtype=np.uint64)
    discarded = np.zeros(W, dtype=np.uint64)
    readouts = []
    fired: dict[str, int] = {}
    pair_total = model.pair_total()
    pair_p = model.pair_probabilities()

    for index, op in enumerate(circuit.ops):
        kind = op[0]
        if kind == "INIT":
            continue
        if kind == "BLOCK":
            _, level, which, qs = op
            bx, bz = source(level, which, shots, rng)
            x[qs] = bx
            z[qs] = bz
        elif kind == "H":
            qs = op[1]
            x[qs], z[qs] = z[qs].copy(), x[qs].copy()
        elif kind in ("CZ", "CNOT"):
            _, a, b, noisy = op
            if kind == "CZ":
                z[a] ^= x[b]
                z[b] ^= x[a]
            else:
                x[b] ^= x[a]
                z[a] ^= z[b]
            if noisy and pair_total > 0:
                pos = bernoulli_positions(len(a) * shots, pair_total, rng)
                if len(pos):
                    t = rng.choice(15, size=len(pos), p=pair_p / pair_total)
                    _inject_pairs(x, z, a, b, pos // shots, pos % shots, t)
            if index in faults:
                _inject_pairs(x, z, a, b, *faults[index])
        elif kind == "M":
            _, basis, qs, first = op
            flips = (z[qs] if basis == "X" else x[qs]).copy()
            if model.p_M > 0:
                pos = bernoulli_positions(len(qs) * shots, float(model.p_M), rng)
                _xor_bits(flips, pos // shots, pos % shots)
            if index in faults:
                _xor_bits(flips, faults[index][0], faults[index][1])
            records[first:first + len(qs)] = flips
        elif kind == "CHECK":
            _, name, level, rec, with_parity = op
            flag = steane.top_check(records[rec], level, with_parity) & mask
            fired[name] = fired.get(name, 0) + popcount(flag & ~rejected)
            rejected |= flag
        elif kind == "VETO":
            _, name, level, rec, with_parity = op
            discarded |= steane.top_check(records[rec], level, with_parity) & mask
        elif kind == "FEED":
            _, level, rec, pauli, qs = op
            flip = steane.detect_only_logical(records[rec], level)
            if pauli == "X":
                x[qs] ^= flip
            else:
                z[qs] ^= flip
        elif kind == "READOUT":
            _, name, level, rec = op
            readouts.append(steane.corrected_logical(records[rec], level) & mask)
        elif kind == "ERR":
            _, labels, qs = op
            for label, q in zip(labels, qs):
                if label in "XY":
                    x[q] ^= mask
                if label in "ZY":
                    z[q] ^= mask
        else:
            raise ValueError(f"unknown op {kind!r}")

    n_out = len(circuit.outputs)
    lx = np.zeros((n_out, W), dtype=np.uint64)
    lz = np.zeros_like(lx)
    for i, blk in enumerate(circuit.outputs):
        lx[i] = steane.corrected_logical(x[blk.qubits], blk.level)
        lz[i] = steane.corrected_logical(z[blk.qubits], blk.level)
    error = np.zeros(W, dtype=np.uint64)
    for g in circuit.target:
        gx, gz = g.x_bits(), g.z_bits()
        anti = np.zeros(W, dtype=np.uint64)
        for i in range(n_out):
            if gz[i]:
                anti ^= lx[i]
            if gx[i]:
                anti ^= lz[i]
        error |= anti
    frame_error = error.copy()
    ro = np.array(readouts, dtype=np.uint64).reshape(len(readouts), W)
    for r in ro:
        error |= r
    return FrameResult(
        shots=shots,
        rejected=rejected & mask,
        discarded=discarded & mask,
        logical_error=error & mask,
        frame_error=frame_error & mask,
        output_lx=lx,
        output_lz=lz,
        readouts=ro,
        check_fired=fired,
        x=x if keep_frames else None,
        z=z if keep_frames else None,
    )


def select_shots(words: np.ndarray, shots: int, keep: np.ndarray) -> np.ndarray:
    """Repack the shots where packed ``keep`` is set (rows are preserved)."""
    bits = unpack(words, shots)
    sel = unpack(keep, shots)
    return pack(bits[..., sel])
