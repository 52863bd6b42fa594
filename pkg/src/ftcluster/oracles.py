"""Brute-force references: dense state vectors for small Clifford circuits."""

from __future__ import annotations

import numpy as np

from .pauli import GATE_ARITY, GATE_MATRICES, PauliString, _PAULI_MATS

MAX_ORACLE_QUBITS = 12


class StateVector:
    """Dense n-qubit state; qubit k is tensor axis k."""

    def __init__(self, n_qubits: int):
        if not 0 < n_qubits <= MAX_ORACLE_QUBITS:
            raise ValueError(f"state-vector oracle supports 1..{MAX_ORACLE_QUBITS} qubits")
        self.n_qubits = n_qubits
        self.psi = np.zeros((2,) * n_qubits, dtype=complex)
        self.psi[(0,) * n_qubits] = 1.0

    def apply(self, gate: str, *targets: int) -> "StateVector":
        k = GATE_ARITY[gate]
        u = GATE_MATRICES[gate].reshape((2,) * (2 * k))
        axes = list(targets)
        moved = np.moveaxis(self.psi, axes, list(range(k)))
        out = np.tensordot(u, moved, axes=(list(range(k, 2 * k)), list(range(k))))
        self.psi = np.moveaxis(out, list(range(k)), axes)
        return self

    def apply_pauli(self, p: PauliString) -> None:
        for q in range(p.n_qubits):
            label = p.label_at(q)
            if label != "I":
                m = _PAULI_MATS[label]
                moved = np.moveaxis(self.psi, q, 0)
                self.psi = np.moveaxis(np.tensordot(m, moved, axes=(1, 0)), 0, q)
        self.psi = self.psi * (1j ** p.phase)

    def expectation(self, p: PauliString) -> float:
        other = StateVector.__new__(StateVector)
        other.n_qubits = self.n_qubits
        other.psi = self.psi.copy()
        other.apply_pauli(p)
        return float(np.vdot(self.psi, other.psi).real)

    def z_distribution(self, qubits: list[int]) -> dict[tuple[int, ...], float]:
        probs = np.abs(self.psi) ** 2
        drop = tuple(q for q in range(self.n_qubits) if q not in qubits)
        marg = probs.sum(axis=drop) if drop else probs
        # marg axes are in increasing qubit order; reorder to the requested order
        order = sorted(qubits)
        marg = np.moveaxis(marg, [order.index(q) for q in qubits], list(range(len(qubits))))
        return {idx: float(marg[idx]) for idx in np.ndindex(marg.shape) if marg[idx] > 1e-12}

    def is_stabilized_by(self, p: PauliString, tol: float = 1e-9) -> bool:
        return abs(self.expectation(p) - 1.0) < tol


def random_clifford_circuit(n_qubits: int, depth: int, rng: np.random.Generator) -> list[tuple]:
    """Random sequence of (gate, *targets) drawn from H, S, X, Z, CZ, CNOT."""
    gates = ["H", "S", "X", "Z", "CZ", "CNOT"] if n_qubits > 1 else ["H", "S", "X", "Z"]
    circuit = []
    for _ in range(depth):
        g = gates[rng.integers(len(gates))]
        if GATE_ARITY[g] == 2:
            a, b = rng.choice(n_qubits, size=2, replace=False)
            circuit.append((g, int(a), int(b)))
        else:
            circuit.append((g, int(rng.integers(n_qubits))))
    return circuit


def random_pauli(n_qubits: int, rng: np.random.Generator) -> PauliString:
    x = rng.integers(2, size=n_qubits).astype(bool)
    z = rng.integers(2, size=n_qubits).astype(bool)
    if not (x | z).any():
        z[rng.integers(n_qubits)] = True
    return PauliString.from_bits(x, z)


def total_variation(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)
