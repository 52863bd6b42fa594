"""Pauli strings, gate conjugation tables and the physical noise model.

A :class:`PauliString` stores ``i**phase * sigma_0 (x) sigma_1 (x) ...`` where each
``sigma_k`` is the Hermitian Pauli selected by ``(x_k, z_k)``:
``(0,0)=I, (1,0)=X, (1,1)=Y, (0,1)=Z``.  Products follow ``Y = iXZ``.
Masks are Python ints (bit ``k`` is qubit ``k``) so strings of a few hundred
qubits stay cheap.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

PAULI_LABELS = "IXYZ"
_LABEL_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1), "_": (0, 0)}
_PHASE_TEXT = {0: "+", 1: "+i", 2: "-", 3: "-i"}

# Ordered list of the 15 non-identity two-qubit Pauli pairs, e.g. "XI", "ZY".
PAIR_LABELS: tuple[str, ...] = tuple(
    a + b for a, b in itertools.product(PAULI_LABELS, repeat=2) if a + b != "II"
)


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliString:
    n_qubits: int
    x_mask: int = 0
    z_mask: int = 0
    phase: int = 0

    def __post_init__(self):
        if self.n_qubits < 0:
            raise ValueError("n_qubits must be non-negative")
        top = 1 << self.n_qubits
        if self.x_mask < 0 or self.z_mask < 0 or self.x_mask >= top or self.z_mask >= top:
            raise ValueError("mask has bits outside the qubit range")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse ``"+XYZ_I"``, ``"-iZZ"`` and similar."""
        phase = 0
        body = label
        for prefix, value in (("+i", 1), ("-i", 3), ("i", 1), ("+", 0), ("-", 2)):
            if body.startswith(prefix):
                phase = value
                body = body[len(prefix):]
                break
        x = z = 0
        for k, ch in enumerate(body):
            try:
                bx, bz = _LABEL_BITS[ch]
            except KeyError:
                raise ValueError(f"bad Pauli character {ch!r} in {label!r}") from None
            x |= bx << k
            z |= bz << k
        return cls(len(body), x, z, phase)

    @classmethod
    def single(cls, n: int, qubit: int, kind: str) -> "PauliString":
        bx, bz = _LABEL_BITS[kind]
        return cls(n, bx << qubit, bz << qubit)

    @classmethod
    def on(cls, n: int, qubits: Iterable[int], kind: str) -> "PauliString":
        bx, bz = _LABEL_BITS[kind]
        x = z = 0
        for q in qubits:
            x |= bx << q
            z |= bz << q
        return cls(n, x, z)

    def __str__(self) -> str:
        return _PHASE_TEXT[self.phase] + "".join(self.label_at(k) for k in range(self.n_qubits))

    def label_at(self, k: int) -> str:
        code = ((self.x_mask >> k) & 1) | (((self.z_mask >> k) & 1) << 1)
        return "IXZY"[code]

    @property
    def weight(self) -> int:
        return _popcount(self.x_mask | self.z_mask)

    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def commutes(self, other: "PauliString") -> bool:
        _check_size(self, other)
        return (_popcount(self.x_mask & other.z_mask) + _popcount(self.z_mask & other.x_mask)) % 2 == 0

    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_mul(self, other)

    def unsigned(self) -> "PauliString":
        return PauliString(self.n_qubits, self.x_mask, self.z_mask, 0)

    def restrict(self, qubits: list[int]) -> "PauliString":
        """Sub-string on ``qubits`` (in the given order), phase dropped."""
        x = z = 0
        for k, q in enumerate(qubits):
            x |= ((self.x_mask >> q) & 1) << k
            z |= ((self.z_mask >> q) & 1) << k
        return PauliString(len(qubits), x, z)

    def x_bits(self) -> np.ndarray:
        return _mask_to_bits(self.x_mask, self.n_qubits)

    def z_bits(self) -> np.ndarray:
        return _mask_to_bits(self.z_mask, self.n_qubits)

    @classmethod
    def from_bits(cls, x, z, phase: int = 0) -> "PauliString":
        x = np.asarray(x, dtype=bool)
        z = np.asarray(z, dtype=bool)
        return cls(len(x), _bits_to_mask(x), _bits_to_mask(z), phase)


def _mask_to_bits(mask: int, n: int) -> np.ndarray:
    return np.array([(mask >> k) & 1 for k in range(n)], dtype=bool)


def _bits_to_mask(bits: np.ndarray) -> int:
    mask = 0
    for k in np.flatnonzero(bits):
        mask |= 1 << int(k)
    return mask


def _check_size(a: PauliString, b: PauliString) -> None:
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"Pauli size mismatch: {a.n_qubits} vs {b.n_qubits}")


def pauli_mul(a: PauliString, b: PauliString) -> PauliString:
    """Group product ``a * b`` with the phase tracked exactly."""
    _check_size(a, b)
    full = (1 << a.n_qubits) - 1
    ax, az, bx, bz = a.x_mask, a.z_mask, b.x_mask, b.z_mask
    a_x = ax & ~az & full
    a_y = ax & az
    a_z = ~ax & az & full
    b_x = bx & ~bz & full
    b_y = bx & bz
    b_z = ~bx & bz & full
    # XY = iZ, YZ = iX, ZX = iY; the reversed orders give -i.
    plus = _popcount(a_x & b_y) + _popcount(a_y & b_z) + _popcount(a_z & b_x)
    minus = _popcount(a_y & b_x) + _popcount(a_z & b_y) + _popcount(a_x & b_z)
    phase = a.phase + b.phase + plus - minus
    return PauliString(a.n_qubits, ax ^ bx, az ^ bz, phase)


# --- gate conjugation ------------------------------------------------------------

_SQRT_HALF = 1 / np.sqrt(2)
GATE_MATRICES: dict[str, np.ndarray] = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT_HALF,
    "S": np.diag([1, 1j]),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    # control is the first target (the more significant bit of the 4x4 matrix)
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
}
GATE_ARITY = {"H": 1, "S": 1, "X": 1, "Z": 1, "CZ": 2, "CNOT": 2}

_PAULI_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": GATE_MATRICES["X"],
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": GATE_MATRICES["Z"],
}


def _local_matrix(label: str) -> np.ndarray:
    m = np.array([[1]], dtype=complex)
    for ch in label:
        m = np.kron(m, _PAULI_MATS[ch])
    return m


def _build_conjugation_table(gate: str) -> dict[str, tuple[str, int]]:
    """Map each local Pauli label P to (label, phase) of U P U^dagger."""
    u = GATE_MATRICES[gate]
    arity = GATE_ARITY[gate]
    labels = ["".join(t) for t in itertools.product(PAULI_LABELS, repeat=arity)]
    table = {}
    for p in labels:
        img = u @ _local_matrix(p) @ u.conj().T
        for q in labels:
            qm = _local_matrix(q)
            overlap = np.trace(qm.conj().T @ img) / qm.shape[0]
            if abs(abs(overlap) - 1) < 1e-9:
                phase = {1: 0, 1j: 1, -1: 2, -1j: 3}[complex(round(overlap.real), round(overlap.imag))]
                table[p] = (q, phase)
                break
        else:  # pragma: no cover - gates above are Clifford
            raise AssertionError(f"{gate} is not Clifford")
    return table


CONJUGATION_TABLES = {g: _build_conjugation_table(g) for g in GATE_MATRICES}


def conjugate(p: PauliString, gate: str, targets: tuple[int, ...]) -> PauliString:
    """Return ``U p U^dagger`` for a Clifford gate acting on ``targets``.

    For two-qubit gates ``targets[0]`` is the first tensor factor (the
    control for CNOT).
    """
    table = CONJUGATION_TABLES[gate]
    local = "".join(p.label_at(t) for t in targets)
    new_label, dphase = table[local]
    x, z = p.x_mask, p.z_mask
    for t, ch in zip(targets, new_label):
        bx, bz = _LABEL_BITS[ch]
        x = (x & ~(1 << t)) | (bx << t)
        z = (z & ~(1 << t)) | (bz << t)
    return PauliString(p.n_qubits, x, z, p.phase + dphase)


# --- noise model -----------------------------------------------------------------


def _uniform_table(p_e: float) -> dict[str, float]:
    return {label: p_e / 15 for label in PAIR_LABELS}


@dataclass(frozen=True)
class NoiseModel:
    """Physical error parameters.

    ``two_qubit_table`` maps each of the 15 non-identity pairs ``"AB"`` to its
    probability; the default is uniform depolarizing with ``p_AB = p_e/15`` and
    ``p_M = 4 p_e/15``.  ``tau_m`` and ``n_steps`` only enter the analytic
    memory threshold.
    """

    p_e: float
    two_qubit_table: Mapping[str, float] = field(default=None)  # type: ignore[assignment]
    p_M: float = None  # type: ignore[assignment]
    tau_m: float = 0.0
    n_steps: int = 0

    def __post_init__(self):
        if self.two_qubit_table is None:
            object.__setattr__(self, "two_qubit_table", _uniform_table(self.p_e))
        else:
            table = {k: 0.0 for k in PAIR_LABELS}
            for k, v in dict(self.two_qubit_table).items():
                if k not in table:
                    raise ValueError(f"unknown Pauli pair {k!r}")
                table[k] = v
            object.__setattr__(self, "two_qubit_table", table)
        if self.p_M is None:
            object.__setattr__(self, "p_M", 4 * self.p_e / 15)
        for name, v in [("p_e", self.p_e), ("p_M", self.p_M), *self.two_qubit_table.items()]:
            if not 0 <= v <= 1:
                raise ValueError(f"probability {name}={v} outside [0, 1]")
        if self.pair_total() > 1 + 1e-12:
            raise ValueError("two-qubit error table sums to more than 1")
        if self.tau_m < 0 or self.n_steps < 0:
            raise ValueError("tau_m and n_steps must be non-negative")

    @classmethod
    def uniform(cls, p_e: float, **kw) -> "NoiseModel":
        return cls(p_e=p_e, **kw)

    def pair_total(self) -> float:
        return float(sum(self.two_qubit_table.values()))

    def pair_probabilities(self) -> np.ndarray:
        return np.array([self.two_qubit_table[k] for k in PAIR_LABELS], dtype=float)

    def p(self, pair: str) -> float:
        return self.two_qubit_table[pair]

    def homogeneous(self) -> tuple[float, float, float]:
        """Per-qubit (X, Y, Z) error rates of a verified level-1 qubit."""
        return self.p("XI"), self.p("YI"), 2 * self.p("ZI")

    def scaled(self, factor: float) -> "NoiseModel":
        return NoiseModel(
            p_e=self.p_e * factor,
            two_qubit_table={k: v * factor for k, v in self.two_qubit_table.items()},
            p_M=self.p_M * factor,
            tau_m=self.tau_m,
            n_steps=self.n_steps,
        )


def sample_two_qubit_error(model: NoiseModel, rng: np.random.Generator) -> PauliString:
    """Draw the Pauli error that follows one noisy two-qubit gate."""
    probs = model.pair_probabilities()
    u = rng.random()
    cum = np.cumsum(probs)
    idx = int(np.searchsorted(cum, u, side="right"))
    if idx >= len(PAIR_LABELS):
        return PauliString(2)
    return PauliString.from_label(PAIR_LABELS[idx])


def sample_measurement_flip(model: NoiseModel, rng: np.random.Generator) -> bool:
    return bool(rng.random() < model.p_M)
