import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ftcluster.pauli import (
    PAIR_LABELS,
    NoiseModel,
    PauliString,
    conjugate,
    pauli_mul,
    sample_measurement_flip,
    sample_two_qubit_error,
)
from ftcluster.oracles import StateVector

paulis = st.text(alphabet="IXYZ", min_size=3, max_size=3).map(PauliString.from_label)


def test_identity_times_p_is_p():
    p = PauliString.from_label("XYZ")
    assert pauli_mul(PauliString.identity(3), p) == p


def test_x_squared_is_identity():
    out = pauli_mul(PauliString.from_label("X"), PauliString.from_label("X"))
    assert out.is_identity() and out.phase == 0


def test_x_times_z_is_minus_i_y():
    out = pauli_mul(PauliString.from_label("X"), PauliString.from_label("Z"))
    assert out.label_at(0) == "Y"
    assert out.phase == 3  # -i


@given(paulis, paulis, paulis)
@settings(max_examples=60, deadline=None)
def test_multiplication_is_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(paulis, paulis)
@settings(max_examples=60, deadline=None)
def test_product_matches_matrices(a, b):
    def mat(p):
        sv = StateVector(3)
        cols = []
        for k in range(8):
            sv.psi = np.zeros((2, 2, 2), dtype=complex)
            sv.psi[tuple((k >> (2 - q)) & 1 for q in range(3))] = 1
            sv.apply_pauli(p)
            cols.append(sv.psi.reshape(-1))
        return np.array(cols).T

    assert np.allclose(mat(a * b), mat(a) @ mat(b))


@given(paulis, paulis)
@settings(max_examples=60, deadline=None)
def test_commutation_is_symmetric_and_matches_products(a, b):
    assert a.commutes(b) == b.commutes(a)
    assert (a * b == b * a) == a.commutes(b)


def test_conjugation_rules():
    assert str(conjugate(PauliString.from_label("X"), "H", (0,))).endswith("Z")
    cz = conjugate(PauliString.from_label("XI"), "CZ", (0, 1))
    assert cz.label_at(0) == "X" and cz.label_at(1) == "Z"
    cn = conjugate(PauliString.from_label("XI"), "CNOT", (0, 1))
    assert cn.label_at(0) == "X" and cn.label_at(1) == "X"
    s = conjugate(PauliString.from_label("X"), "S", (0,))
    assert s.label_at(0) == "Y" and s.phase == 0


def test_pauli_length_mismatch_raises():
    with pytest.raises(ValueError):
        pauli_mul(PauliString.from_label("X"), PauliString.from_label("XX"))


def test_zero_noise_samples_identity(rng):
    model = NoiseModel(0.0)
    assert all(sample_two_qubit_error(model, rng).is_identity() for _ in range(200))
    assert not any(sample_measurement_flip(model, rng) for _ in range(200))


def test_degenerate_table_always_xi(rng):
    model = NoiseModel(0.1, two_qubit_table={"XI": 1.0})
    for _ in range(50):
        e = sample_two_qubit_error(model, rng)
        assert (e.label_at(0), e.label_at(1)) == ("X", "I")


def test_measurement_flip_certain(rng):
    model = NoiseModel(0.0, p_M=1.0)
    assert all(sample_measurement_flip(model, rng) for _ in range(50))


def test_uniform_pair_frequencies():
    # the per-shot sampler is slow; draw indices with the same table in bulk
    model = NoiseModel(0.15)
    probs = model.pair_probabilities()
    assert np.allclose(probs, 0.01)
    rng = np.random.default_rng(3)
    n = 10**6
    idx = np.searchsorted(np.cumsum(probs), rng.random(n), side="right")
    counts = np.bincount(idx, minlength=16)[:15]
    sigma = np.sqrt(n * 0.01 * 0.99)
    assert np.all(np.abs(counts - n * 0.01) < 3 * sigma + 1)


def test_sampler_frequencies_small(rng):
    model = NoiseModel(0.15)
    draws = [sample_two_qubit_error(model, rng) for _ in range(20000)]
    nontrivial = sum(not d.is_identity() for d in draws)
    assert abs(nontrivial / 20000 - 0.15) < 4 * np.sqrt(0.15 * 0.85 / 20000)
    labels = {d.label_at(0) + d.label_at(1) for d in draws if not d.is_identity()}
    assert labels == set(PAIR_LABELS)


def test_measurement_flip_rate():
    model = NoiseModel(0.015)
    assert model.p_M == pytest.approx(0.004)
    rng = np.random.default_rng(5)
    n = 10**6
    rate = (rng.random(n) < model.p_M).mean()
    assert abs(rate - 0.004) < 3 * np.sqrt(0.004 * 0.996 / n)
    few = np.mean([sample_measurement_flip(model, rng) for _ in range(20000)])
    assert abs(few - 0.004) < 5 * np.sqrt(0.004 / 20000)


@pytest.mark.parametrize("bad", [{"XQ": 0.1}, {"XI": -0.1}, {"XI": 0.6, "ZZ": 0.6}])
def test_noise_model_validation(bad):
    with pytest.raises(ValueError):
        NoiseModel(0.1, two_qubit_table=bad)


def test_noise_model_rejects_bad_rates():
    with pytest.raises(ValueError):
        NoiseModel(1.5)
    with pytest.raises(ValueError):
        NoiseModel(0.1, tau_m=-1)
