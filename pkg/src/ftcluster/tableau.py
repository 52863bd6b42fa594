"""Stabilizer tableau simulation with a deferred Pauli frame.

Rows ``0..n-1`` of the tableau hold destabilizers and rows ``n..2n-1`` the
stabilizers; each row carries a sign bit.  The physical state is
``frame * |tableau state>``, so noise can be multiplied into the frame and is
only seen through measurement signs.
"""

from __future__ import annotations

import numpy as np

from .pauli import GATE_ARITY, PauliString, conjugate


def _g(x1, z1, x2, z2):
    """Exponent of i picked up when multiplying single-qubit Paulis (vectorized)."""
    x1 = np.asarray(x1, dtype=bool)
    z1 = np.asarray(z1, dtype=bool)
    x2i = np.asarray(x2, dtype=np.int64)
    z2i = np.asarray(z2, dtype=np.int64)
    out = np.zeros(np.broadcast(x1, z1, x2i, z2i).shape, dtype=np.int64)
    y = x1 & z1
    xo = x1 & ~z1
    zo = ~x1 & z1
    out = np.where(y, z2i - x2i, out)
    out = np.where(xo, z2i * (2 * x2i - 1), out)
    out = np.where(zo, x2i * (1 - 2 * z2i), out)
    return out


class StabilizerState:
    def __init__(self, n_qubits: int):
        if n_qubits <= 0:
            raise ValueError("need at least one qubit")
        n = n_qubits
        self.n_qubits = n
        self.x = np.zeros((2 * n, n), dtype=bool)
        self.z = np.zeros((2 * n, n), dtype=bool)
        self.r = np.zeros(2 * n, dtype=bool)
        idx = np.arange(n)
        self.x[idx, idx] = True  # destabilizers X_k
        self.z[n + idx, idx] = True  # stabilizers Z_k
        self.pauli_frame = PauliString(n)

    def copy(self) -> "StabilizerState":
        other = StabilizerState.__new__(StabilizerState)
        other.n_qubits = self.n_qubits
        other.x = self.x.copy()
        other.z = self.z.copy()
        other.r = self.r.copy()
        other.pauli_frame = self.pauli_frame
        return other

    # -- inspection ---------------------------------------------------------------

    def _row(self, i: int) -> PauliString:
        return PauliString.from_bits(self.x[i], self.z[i], 2 * int(self.r[i]))

    @property
    def stabilizers(self) -> list[PauliString]:
        n = self.n_qubits
        return [self._row(n + i) for i in range(n)]

    @property
    def destabilizers(self) -> list[PauliString]:
        return [self._row(i) for i in range(self.n_qubits)]

    def check_invariants(self) -> None:
        """Raise AssertionError unless the tableau is a valid symplectic basis."""
        n = self.n_qubits
        comm = (self.x.astype(np.uint8) @ self.z.T.astype(np.uint8)
                + self.z.astype(np.uint8) @ self.x.T.astype(np.uint8)) % 2
        expected = np.zeros((2 * n, 2 * n), dtype=np.uint8)
        idx = np.arange(n)
        expected[idx, n + idx] = 1
        expected[n + idx, idx] = 1
        if not np.array_equal(comm, expected):
            raise AssertionError("tableau rows violate the symplectic pairing")
        if self.pauli_frame.n_qubits != n:
            raise AssertionError("pauli frame size mismatch")

    # -- gates --------------------------------------------------------------------

    def _check_targets(self, gate: str, targets: tuple[int, ...]) -> None:
        if gate not in GATE_ARITY:
            raise ValueError(f"unsupported gate {gate!r}")
        if len(targets) != GATE_ARITY[gate]:
            raise ValueError(f"{gate} takes {GATE_ARITY[gate]} target(s), got {len(targets)}")
        for t in targets:
            if not 0 <= t < self.n_qubits:
                raise IndexError(f"target {t} out of range for {self.n_qubits} qubits")
        if len(set(targets)) != len(targets):
            raise ValueError(f"duplicate targets for {gate}: {targets}")

    def apply(self, gate: str, *targets: int) -> "StabilizerState":
        """Apply a Clifford gate in place (tableau and frame); returns self."""
        targets = tuple(int(t) for t in targets)
        self._check_targets(gate, targets)
        x, z, r = self.x, self.z, self.r
        if gate == "H":
            (a,) = targets
            r ^= x[:, a] & z[:, a]
            x[:, a], z[:, a] = z[:, a].copy(), x[:, a].copy()
        elif gate == "S":
            (a,) = targets
            r ^= x[:, a] & z[:, a]
            z[:, a] ^= x[:, a]
        elif gate == "X":
            r ^= z[:, targets[0]]
        elif gate == "Z":
            r ^= x[:, targets[0]]
        elif gate == "CNOT":
            a, b = targets
            r ^= x[:, a] & z[:, b] & ~(x[:, b] ^ z[:, a])
            x[:, b] ^= x[:, a]
            z[:, a] ^= z[:, b]
        elif gate == "CZ":
            a, b = targets
            # CZ = H_b CNOT H_b, written out directly
            r ^= x[:, a] & x[:, b] & (z[:, a] ^ z[:, b])
            z[:, a] ^= x[:, b]
            z[:, b] ^= x[:, a]
        self.pauli_frame = conjugate(self.pauli_frame, gate, targets)
        return self

    def apply_error(self, error: PauliString, qubits: tuple[int, ...] | None = None) -> None:
        """Multiply a Pauli error into the frame (optionally a local error on ``qubits``)."""
        if qubits is not None:
            x = z = 0
            for k, q in enumerate(qubits):
                x |= ((error.x_mask >> k) & 1) << q
                z |= ((error.z_mask >> k) & 1) << q
            error = PauliString(self.n_qubits, x, z)
        self.pauli_frame = (self.pauli_frame * error).unsigned()

    # -- measurement --------------------------------------------------------------

    def _anticommuting_rows(self, ox: np.ndarray, oz: np.ndarray) -> np.ndarray:
        return ((self.x & oz).sum(axis=1) + (self.z & ox).sum(axis=1)) % 2 == 1

    def _rowmul(self, targets: np.ndarray, src_x, src_z, src_r) -> None:
        """Left-multiply rows ``targets`` by the Pauli (src_x, src_z, src_r)."""
        if len(targets) == 0:
            return
        tx, tz = self.x[targets], self.z[targets]
        phase = 2 * self.r[targets].astype(np.int64) + 2 * int(src_r)
        phase += _g(np.broadcast_to(src_x, tx.shape), np.broadcast_to(src_z, tz.shape), tx, tz).sum(axis=1)
        self.r[targets] = (phase % 4) >= 2
        self.x[targets] = tx ^ src_x
        self.z[targets] = tz ^ src_z

    def _determined_sign(self, ox: np.ndarray, oz: np.ndarray) -> int:
        """Sign s with s*obs in the stabilizer group (obs must commute with it)."""
        n = self.n_qubits
        anti = self._anticommuting_rows(ox, oz)[:n]
        acc_x = np.zeros(n, dtype=bool)
        acc_z = np.zeros(n, dtype=bool)
        phase = 0
        for i in np.flatnonzero(anti):
            sx, sz = self.x[n + i], self.z[n + i]
            phase += 2 * int(self.r[n + i]) + int(_g(sx, sz, acc_x, acc_z).sum())
            acc_x ^= sx
            acc_z ^= sz
        return 1 if phase % 4 == 0 else -1

    def peek(self, obs: PauliString) -> int:
        """Expectation of ``obs`` ignoring the frame: +1, -1, or 0 if random."""
        if obs.n_qubits != self.n_qubits:
            raise ValueError("observable size mismatch")
        ox, oz = obs.x_bits(), obs.z_bits()
        if self._anticommuting_rows(ox, oz)[self.n_qubits:].any():
            return 0
        sign = self._determined_sign(ox, oz)
        return -sign if obs.phase == 2 else sign

    def measure(self, obs: PauliString, rng: np.random.Generator) -> int:
        """Measure a Hermitian Pauli observable; returns +1 or -1 (frame applied)."""
        if obs.n_qubits != self.n_qubits:
            raise ValueError("observable size mismatch")
        if obs.phase not in (0, 2):
            raise ValueError("observable must be Hermitian (phase +1 or -1)")
        n = self.n_qubits
        ox, oz = obs.x_bits(), obs.z_bits()
        anti = self._anticommuting_rows(ox, oz)
        stab_anti = np.flatnonzero(anti[n:]) + n
        if len(stab_anti):
            p = stab_anti[0]
            others = np.flatnonzero(anti)
            others = others[others != p]
            self._rowmul(others, self.x[p].copy(), self.z[p].copy(), self.r[p])
            self.x[p - n], self.z[p - n], self.r[p - n] = self.x[p], self.z[p], self.r[p]
            outcome_bit = bool(rng.integers(2))
            self.x[p], self.z[p], self.r[p] = ox, oz, outcome_bit
            sign = -1 if outcome_bit else 1
        else:
            sign = self._determined_sign(ox, oz)
        if obs.phase == 2:
            # the tableau measured +obs' = -obs, flip the report; state unchanged
            sign = -sign
        if not self.pauli_frame.commutes(obs):
            sign = -sign
        return sign

    def measure_qubit(self, qubit: int, basis: str, rng: np.random.Generator) -> int:
        return self.measure(PauliString.single(self.n_qubits, qubit, basis), rng)


def measure_pauli(state: StabilizerState, obs: PauliString, rng: np.random.Generator) -> int:
    return state.measure(obs, rng)


def apply_clifford(state: StabilizerState, gate: str, targets) -> StabilizerState:
    if isinstance(targets, int):
        targets = (targets,)
    return state.apply(gate, *targets)


def same_stabilizer_group(state: StabilizerState, generators: list[PauliString]) -> bool:
    """True iff ``generators`` (with signs) generate exactly the state's group."""
    if len(generators) != state.n_qubits:
        return False
    if any(state.peek(g) != 1 for g in generators):
        return False
    # independence: rank of the generator matrix over GF(2)
    m = np.array([np.concatenate([g.x_bits(), g.z_bits()]) for g in generators], dtype=np.uint8)
    return gf2_rank(m) == state.n_qubits


def gf2_rank(m: np.ndarray) -> int:
    m = m.copy().astype(np.uint8) % 2
    rank = 0
    rows, cols = m.shape
    for c in range(cols):
        pivot = None
        for i in range(rank, rows):
            if m[i, c]:
                pivot = i
                break
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        for i in range(rows):
            if i != rank and m[i, c]:
                m[i] ^= m[rank]
        rank += 1
        if rank == rows:
            break
    return rank
