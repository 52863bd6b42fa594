"""The [[7,1,3]] Steane code and its concatenations.

Qubit ``k`` (0-based) of a block sits in Hamming column ``k+1``, so a single
flip on qubit ``k`` produces the syndrome value ``k+1`` (bit ``i`` of the
syndrome is parity-check row ``i``).  A level-``l`` block is 7 contiguous
level-``l-1`` blocks; level 0 is a single physical qubit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import PauliString
from .tableau import StabilizerState

N = 7
HAMMING = np.array([[((col + 1) >> row) & 1 for col in range(N)] for row in range(3)], dtype=np.uint8)
CHECK_SUPPORTS: tuple[tuple[int, ...], ...] = tuple(
    tuple(int(k) for k in np.flatnonzero(HAMMING[row])) for row in range(3)
)
# Graph-state encoder: pivot k of check row i is qubit 2**i - 1; the remaining
# qubits are joined to the pivots whose rows contain them.
PIVOTS = (0, 1, 3)
NON_PIVOTS = (2, 4, 5, 6)
ENCODER_EDGES: tuple[tuple[int, int], ...] = tuple(
    (PIVOTS[row], q) for row in range(3) for q in CHECK_SUPPORTS[row] if q != PIVOTS[row]
)


def block_size(level: int) -> int:
    return N**level


@dataclass(frozen=True)
class Syndrome:
    x_checks: tuple[int, int, int]  # from X-type generators (flag Z errors)
    z_checks: tuple[int, int, int]  # from Z-type generators (flag X errors)

    @property
    def clean(self) -> bool:
        return not any(self.x_checks) and not any(self.z_checks)

    @staticmethod
    def value(bits) -> int:
        return int(bits[0]) | (int(bits[1]) << 1) | (int(bits[2]) << 2)


@dataclass(frozen=True)
class CodeBlock:
    """A level-``level`` block addressed by its physical qubit indices."""

    level: int
    qubits: tuple[int, ...]

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("level must be non-negative")
        if len(self.qubits) != block_size(self.level):
            raise ValueError(f"level-{self.level} block needs {block_size(self.level)} qubits")

    def children(self) -> list["CodeBlock"]:
        if self.level == 0:
            raise ValueError("a physical qubit has no children")
        size = block_size(self.level - 1)
        return [CodeBlock(self.level - 1, self.qubits[i * size:(i + 1) * size]) for i in range(N)]


def stabilizer_generators() -> list[PauliString]:
    """Three X-type then three Z-type weight-4 generators."""
    gens = [PauliString.on(N, sup, "X") for sup in CHECK_SUPPORTS]
    gens += [PauliString.on(N, sup, "Z") for sup in CHECK_SUPPORTS]
    return gens


def logical_x(n: int = N, qubits=None) -> PauliString:
    return PauliString.on(n, range(N) if qubits is None else qubits, "X")


def logical_z(n: int = N, qubits=None) -> PauliString:
    return PauliString.on(n, range(N) if qubits is None else qubits, "Z")


# --- classical decoding -----------------------------------------------------------
# Works for bool arrays and for bit-packed uint64 words alike (only ^ and |).


def syndrome_bits(bits):
    """Three parity checks of 7 values stacked on axis 0."""
    return tuple(bits[s[0]] ^ bits[s[1]] ^ bits[s[2]] ^ bits[s[3]] for s in CHECK_SUPPORTS)


def parity(bits):
    out = bits[0]
    for k in range(1, N):
        out = out ^ bits[k]
    return out


def correct_and_decode(bits):
    """Hamming-correct one flip and return the logical parity."""
    s0, s1, s2 = syndrome_bits(bits)
    return parity(bits) ^ (s0 | s1 | s2)


def decode_below_top(bits: np.ndarray, level: int) -> np.ndarray:
    """Reduce a level-``level`` block (axis 0 of length 7**level) to 7 values
    by correcting-and-decoding every sub-block below the top level."""
    if level < 1:
        raise ValueError("need a level >= 1 block")
    arr = np.asarray(bits)
    if arr.shape[0] != block_size(level):
        raise ValueError("record length does not match block level")
    for _ in range(level - 1):
        arr = arr.reshape((arr.shape[0] // N, N) + arr.shape[1:])
        arr = correct_and_decode(np.moveaxis(arr, 1, 0))
    return arr


def top_check(bits: np.ndarray, level: int, with_parity: bool = False):
    """OR of the top-level syndrome bits (and parity if requested): nonzero = reject."""
    if level == 0:
        return np.zeros_like(np.asarray(bits)[0])
    top = decode_below_top(bits, level)
    s0, s1, s2 = syndrome_bits(top)
    flag = s0 | s1 | s2
    if with_parity:
        flag = flag | parity(top)
    return flag


def detect_only_logical(bits: np.ndarray, level: int):
    """Logical value of a measured block whose top syndrome was required clean."""
    if level == 0:
        return np.asarray(bits)[0]
    return parity(decode_below_top(bits, level))


def corrected_logical(bits: np.ndarray, level: int):
    """Logical value after ideal correction at every level, top included."""
    if level == 0:
        return np.asarray(bits)[0]
    return correct_and_decode(decode_below_top(bits, level))


def syndrome_of(error: PauliString) -> Syndrome:
    """Syndrome of a 7-qubit Pauli error under the Steane generators."""
    xb = error.x_bits().astype(np.uint8)
    zb = error.z_bits().astype(np.uint8)
    return Syndrome(
        x_checks=tuple(int(v) for v in (HAMMING @ zb) % 2),
        z_checks=tuple(int(v) for v in (HAMMING @ xb) % 2),
    )


# --- noiseless encoders -------------------------------------------------------------


def encoder_ops(qubits: tuple[int, ...], level: int, which: str) -> list[tuple]:
    """Gate list preparing a level-``level`` |0>/|+> on ``qubits`` from |0...0>."""
    if which not in ("zero", "plus"):
        raise ValueError(f"unknown code state {which!r}")
    ops: list[tuple] = []
    if level == 0:
        if which == "plus":
            ops.append(("H", qubits[0]))
        return ops
    block = CodeBlock(level, tuple(qubits))
    kids = block.children()
    for kid in kids:
        ops += encoder_ops(kid.qubits, level - 1, "plus")
    for a, b in ENCODER_EDGES:
        ops += [("CZ", qa, qb) for qa, qb in zip(kids[a].qubits, kids[b].qubits)]
    for k in NON_PIVOTS:
        ops += [("H", q) for q in kids[k].qubits]
    if which == "plus":
        ops += [("H", q) for q in qubits]
    return ops


def encode_logical(which: str, level: int = 1) -> StabilizerState:
    """Noiseless code state on ``7**level`` qubits."""
    n = block_size(level)
    state = StabilizerState(n)
    for gate, *targets in encoder_ops(tuple(range(n)), level, which):
        state.apply(gate, *targets)
    return state


def transversal_gate(state: StabilizerState, blocks: list[CodeBlock], gate: str) -> StabilizerState:
    """Apply ``gate`` qubit-wise across equal-level blocks (H, S, CZ, CNOT)."""
    arity = {"H": 1, "S": 1, "CZ": 2, "CNOT": 2}.get(gate)
    if arity is None:
        raise ValueError(f"{gate} is not a transversal gate of this code")
    if len(blocks) != arity:
        raise ValueError(f"{gate} needs {arity} block(s)")
    if len({b.level for b in blocks}) != 1:
        raise ValueError("transversal gates need blocks at equal level")
    # S^7 acts as logical S^dagger, so odd levels need physical S^dagger (= S^3).
    reps = 3 if gate == "S" and blocks[0].level % 2 == 1 else 1
    for targets in zip(*(b.qubits for b in blocks)):
        for _ in range(reps):
            state.apply(gate, *targets)
    return state


def logical_operator(kind: str, block: CodeBlock, n_total: int) -> PauliString:
    """Transversal logical X/Z (valid at every concatenation level)."""
    return PauliString.on(n_total, block.qubits, kind)
