import numpy as np
import pytest

from ftcluster.oracles import StateVector, random_clifford_circuit
from ftcluster.pauli import PauliString
from ftcluster.tableau import StabilizerState, apply_clifford, measure_pauli, same_stabilizer_group
from ftcluster.validation import corrupted_phase, tableau_distribution, tableau_vs_statevector


def cluster2():
    s = StabilizerState(2)
    s.apply("H", 0).apply("H", 1).apply("CZ", 0, 1)
    return s


def test_h_turns_z_into_x():
    s = apply_clifford(StabilizerState(1), "H", (0,))
    assert same_stabilizer_group(s, [PauliString.from_label("X")])


def test_cz_on_plus_plus_is_cluster():
    assert same_stabilizer_group(cluster2(), [PauliString.from_label("XZ"), PauliString.from_label("ZX")])


def test_measure_z_on_zero_is_deterministic(rng):
    assert all(measure_pauli(StabilizerState(1), PauliString.from_label("Z"), rng) == 1 for _ in range(20))


def test_measure_x_on_zero_is_fair(rng):
    n = 10_000
    ups = sum(measure_pauli(StabilizerState(1), PauliString.from_label("X"), rng) == 1 for _ in range(n))
    chi2 = (ups - n / 2) ** 2 / (n / 4)
    assert chi2 < 10.83  # p = 0.001, one degree of freedom


def test_measure_cluster_stabilizer(rng):
    for _ in range(10):
        assert cluster2().measure(PauliString.from_label("XZ"), rng) == 1


def test_negative_observable_and_repeat(rng):
    s = StabilizerState(1)
    minus_z = PauliString(1, 0, 1, 2)
    assert s.measure(minus_z, rng) == -1
    s.apply("H", 0)
    first = s.measure(PauliString.from_label("Z"), rng)
    assert all(s.measure(PauliString.from_label("Z"), rng) == first for _ in range(5))


def test_frame_flips_outcomes(rng):
    s = StabilizerState(2)
    s.apply_error(PauliString.from_label("XI"))
    assert s.measure(PauliString.from_label("ZI"), rng) == -1
    assert s.measure(PauliString.from_label("IZ"), rng) == 1
    s.apply("CNOT", 0, 1)
    assert s.measure(PauliString.from_label("IZ"), rng) == -1


def test_invalid_targets():
    s = StabilizerState(2)
    with pytest.raises(ValueError):
        s.apply("CZ", 0, 0)
    with pytest.raises(IndexError):
        s.apply("H", 5)
    with pytest.raises(ValueError):
        s.measure(PauliString(2, 1, 0, 1), np.random.default_rng(0))


@pytest.mark.parametrize("seed", range(12))
def test_random_8_qubit_circuits_match_statevector(seed):
    rng = np.random.default_rng(seed)
    circuit = random_clifford_circuit(8, 40, rng)
    tab, sv = StabilizerState(8), StateVector(8)
    for gate, *t in circuit:
        tab.apply(gate, *t)
        sv.apply(gate, *t)
    tab.check_invariants()
    for g in tab.stabilizers:
        assert sv.is_stabilized_by(g)


def test_tableau_distribution_matches_statevector():
    rng = np.random.default_rng(1)
    circuit = random_clifford_circuit(5, 25, rng)
    tab, sv = StabilizerState(5), StateVector(5)
    for gate, *t in circuit:
        tab.apply(gate, *t)
        sv.apply(gate, *t)
    exact = sv.z_distribution(list(range(5)))
    dist = tableau_distribution(tab, list(range(5)))
    assert set(exact) == set(dist)
    assert all(abs(exact[k] - dist[k]) < 1e-9 for k in exact)


def test_oracle_comparison_passes_and_negative_control_fails():
    assert tableau_vs_statevector(15, seed=3).passed
    with corrupted_phase():
        bad = tableau_vs_statevector(15, seed=3)
    assert not bad.passed and "circuit #" in bad.reproduction
