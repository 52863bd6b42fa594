import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ftcluster import framesim as fs
from ftcluster import gadgets
from ftcluster.circuit import Circuit, level1_preparation
from ftcluster.enumeration import enumerate_faults, flatten, single_fault_report
from ftcluster.pauli import NoiseModel


@given(st.integers(1, 300), st.integers(0, 2**31))
@settings(max_examples=40, deadline=None)
def test_pack_round_trip(shots, seed):
    bits = np.random.default_rng(seed).random((3, shots)) < 0.5
    words = fs.pack(bits)
    assert words.shape == (3, fs.n_words(shots))
    assert np.array_equal(fs.unpack(words, shots), bits)
    assert fs.popcount(words) == bits.sum()


def test_valid_mask_counts_shots():
    assert fs.popcount(fs.valid_mask(130)) == 130


def test_bernoulli_positions_rate():
    rng = np.random.default_rng(9)
    pos = fs.bernoulli_positions(10**6, 0.003, rng)
    assert np.all(np.diff(pos) > 0) and pos[-1] < 10**6
    assert abs(len(pos) - 3000) < 4 * np.sqrt(3000)
    assert len(fs.bernoulli_positions(10, 0.0, rng)) == 0
    assert len(fs.bernoulli_positions(10, 1.0, rng)) == 10


def test_noiseless_gadget_has_no_errors(rng):
    res = fs.run_frames(gadgets.gadget_circuit("cz_double", 1), NoiseModel(0.0), 500, rng)
    assert res.accept_count() == 500 and res.error_count() == 0


def test_preparation_veto_discards():
    c = Circuit()
    d = c.alloc(7)
    c.init("Z", d)
    c.plant("X", [d[0]])
    rec = c.measure("Z", d)
    c.veto("prep", 1, rec)
    res = fs.run_frames(c, NoiseModel(0.0), 70, np.random.default_rng(0))
    assert fs.popcount(res.discarded) == 70
    assert res.accept_count() == 0


@pytest.mark.parametrize("node", ["in1", "in2", "a1", "a2"])
@pytest.mark.parametrize("label", ["X", "Y", "Z"])
def test_planted_errors_agree_with_tableau(node, label):
    base = gadgets.gadget_circuit("cz_single", 1)
    for position in range(7):
        circuit = gadgets.planted(base, node, position, label)
        res = fs.run_frames(circuit, NoiseModel(0.0), 64, np.random.default_rng(0))
        frame_accept = fs.popcount(res.accepted) == 64
        tab, _ = gadgets.run_gadget("cz_single", 1, NoiseModel(0.0), np.random.default_rng(0),
                                    plant=[(node, position, label)])
        assert frame_accept == tab.accepted


def test_deterministic_faults_argument():
    circuit = flatten(gadgets.gadget_circuit("cz_single", 1))
    locs = circuit.locations()
    op, _, pos = next(loc for loc in locs if loc[1] == "pair")
    faults = {op: (np.array([pos]), np.array([3]), np.array([0]))}
    res = fs.run_frames(circuit, NoiseModel(0.0), 64, np.random.default_rng(0), faults=faults)
    flagged = fs.unpack(~res.accepted & fs.valid_mask(64), 64)
    assert flagged.sum() <= 1 and not flagged[np.arange(64) != 3].any()


def test_single_fault_census_of_level1_cz():
    # frozen from the implementation: no single fault causes a logical error
    report = single_fault_report(gadgets.gadget_circuit("cz_single", 1))
    assert report == {"events": 2845, "discarded": 2016, "rejected": 530, "harmless": 299, "logical": 0}


def test_preparation_is_fault_tolerant():
    report = single_fault_report(level1_preparation("zero"))
    assert report["logical"] == 0


def test_first_order_enumeration_of_cz():
    model = NoiseModel(1e-3)
    res = enumerate_faults(gadgets.gadget_circuit("cz_single", 1), model, order=1)
    assert res.first_order_error == 0.0
    assert 0.95 < res.acceptance < 0.975
    assert enumerate_faults(Circuit(), model).acceptance == 1.0


def test_enumeration_rejects_deep_blocks():
    with pytest.raises(ValueError):
        flatten(gadgets.gadget_circuit("cz_single", 2))
