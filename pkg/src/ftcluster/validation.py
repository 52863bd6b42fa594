"""Correctness suites run by ``ftcluster oracle-check`` and the acceptance tests.

Two independent references are used: dense state vectors for random Clifford
circuits, and exhaustive fault enumeration for the level-1 verified C-Z.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import montecarlo as mc
from .oracles import StateVector, random_clifford_circuit, total_variation
from .pauli import NoiseModel, PauliString
from .tableau import StabilizerState

TV_LIMIT = 0.02


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    reproduction: str = ""


@dataclass
class SuiteResult:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            out.append(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}")
            if not c.passed and c.reproduction:
                out.append(f"  reproduce: {c.reproduction}")
        return out


class _Forced:
    """Stands in for a Generator so a tableau measurement takes a chosen branch."""

    def __init__(self, bit: int):
        self.bit = bit

    def integers(self, *_):
        return self.bit


def tableau_distribution(state: StabilizerState, qubits: list[int]) -> dict[tuple[int, ...], float]:
    """Exact Z-basis outcome distribution on ``qubits``, by branching the tableau."""
    out: dict[tuple[int, ...], float] = {}

    def walk(st: StabilizerState, k: int, prefix: tuple[int, ...], weight: float):
        if k == len(qubits):
            out[prefix] = out.get(prefix, 0.0) + weight
            return
        obs = PauliString.single(st.n_qubits, qubits[k], "Z")
        if st.peek(obs) != 0:
            bit = 0 if st.measure(obs, _Forced(0)) == 1 else 1
            walk(st, k + 1, prefix + (bit,), weight)
            return
        for forced in (0, 1):
            branch = st.copy()
            bit = 0 if branch.measure(obs, _Forced(forced)) == 1 else 1
            walk(branch, k + 1, prefix + (bit,), weight / 2)

    walk(state, 0, (), 1.0)
    return out


def _run_both(n: int, circuit: list[tuple]) -> tuple[StabilizerState, StateVector]:
    tab, sv = StabilizerState(n), StateVector(n)
    for gate, *targets in circuit:
        tab.apply(gate, *targets)
        sv.apply(gate, *targets)
    return tab, sv


def tableau_vs_statevector(n_circuits: int = 100, shots: int = 10_000, seed: int = 7,
                           max_qubits: int = 10, register: int = 3) -> CheckResult:
    """Compare the two simulators on random Clifford circuits.

    Every stabilizer generator of the tableau must have expectation +1 in the
    state vector, and outcomes of a random ``register``-qubit Z measurement,
    sampled ``shots`` times from the tableau, must sit within TV_LIMIT of the
    exact state-vector marginal.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(n_circuits):
        n = int(rng.integers(1, max_qubits + 1))
        circuit = random_clifford_circuit(n, int(rng.integers(n, 4 * n + 8)), rng)
        tab, sv = _run_both(n, circuit)
        repro = f"seed={seed} circuit #{i} n={n} gates={circuit}"
        for g in tab.stabilizers:
            if not sv.is_stabilized_by(g):
                return CheckResult("tableau-statevector-stabilizers", False,
                                   f"generator {g} not stabilizing (circuit #{i})", repro)
        qubits = [int(q) for q in rng.choice(n, size=min(register, n), replace=False)]
        exact = sv.z_distribution(qubits)
        dist = tableau_distribution(tab.copy(), qubits)
        keys = list(dist)
        counts = rng.multinomial(shots, [dist[k] for k in keys])
        sampled = {k: c / shots for k, c in zip(keys, counts)}
        tv = total_variation(sampled, exact)
        worst = max(worst, tv)
        if tv >= TV_LIMIT:
            return CheckResult("tableau-statevector-tv", False,
                               f"TV={tv:.4f} >= {TV_LIMIT} on qubits {qubits} (circuit #{i})", repro)
    return CheckResult("tableau-statevector", True,
                       f"{n_circuits} circuits, {shots} shots each, max TV {worst:.4f}")


def montecarlo_vs_enumeration(p_e: float = 1e-3, trials: int = 200_000, seed: int = 11,
                              gadget: str = "cz_single") -> CheckResult:
    """Monte Carlo acceptance inside the Wilson interval around the enumerated value."""
    model = NoiseModel(p_e)
    oracle = mc.enumeration_oracle(gadget, 1, model, order=2)
    rep = mc.run_trials(mc.TrialPlan(gadget, 1, model, trials, seed, "faithful"))
    ok_acc = rep.ci_low <= oracle.acceptance <= rep.ci_high
    ok_err = rep.cond_err_lo <= oracle.conditional_error <= rep.cond_err_hi
    detail = (f"{gadget} p_e={p_e:g}: acceptance MC {rep.p_hat:.5f} [{rep.ci_low:.5f}, {rep.ci_high:.5f}] "
              f"vs enumerated {oracle.acceptance:.5f}; cond_err MC {rep.cond_err:.2e} "
              f"[{rep.cond_err_lo:.2e}, {rep.cond_err_hi:.2e}] vs enumerated {oracle.conditional_error:.2e}")
    return CheckResult("montecarlo-enumeration", ok_acc and ok_err, detail,
                       f"seed={seed} gadget={gadget} level=1 p_e={p_e} trials={trials}")


def analytic_chain() -> CheckResult:
    from . import analytic

    d = analytic.default_D()
    return CheckResult("analytic-D", d == Fraction(17, 15), f"D={d}")


@contextlib.contextmanager
def corrupted_phase():
    """Negative control: drop the sign update of the tableau S gate."""
    original = StabilizerState.apply

    def apply(self, gate, *targets):
        if gate == "S":
            (a,) = targets
            self.z[:, a] ^= self.x[:, a]
            return self
        return original(self, gate, *targets)

    StabilizerState.apply = apply
    try:
        yield
    finally:
        StabilizerState.apply = original


def run_suite(quick: bool = False, seed: int = 7) -> SuiteResult:
    result = SuiteResult()
    result.checks.append(analytic_chain())
    result.checks.append(tableau_vs_statevector(20 if quick else 100, seed=seed))
    result.checks.append(montecarlo_vs_enumeration(trials=50_000 if quick else 200_000, seed=seed + 4))
    return result
