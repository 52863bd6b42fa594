import numpy as np
import pytest

from ftcluster import gadgets
from ftcluster.execute import logical_expectations
from ftcluster.gadgets import (
    build_code_ancilla,
    build_hexa,
    gadget_circuit,
    ideal_hexa_state,
    one_bit_teleport,
    verified_cz_double,
    verified_cz_single,
)
from ftcluster.oracles import StateVector
from ftcluster.pauli import NoiseModel, PauliString


def test_ideal_hexa_stabilizers(rng):
    state = ideal_hexa_state()
    for i in range(6):
        label = ["I"] * 6
        label[i] = "X"
        if i > 0:
            label[i - 1] = "Z"
        if i < 5:
            label[i + 1] = "Z"
        assert state.copy().measure(PauliString.from_label("".join(label)), rng) == 1


def test_ideal_hexa_matches_statevector():
    sv = StateVector(6)
    for q in range(6):
        sv.apply("H", q)
    for q in range(5):
        sv.apply("CZ", q, q + 1)
    assert all(sv.is_stabilized_by(g) for g in ideal_hexa_state().stabilizers)


def _entropies(state, qubits):
    from itertools import combinations

    from ftcluster.execute import stabilizers_on

    out = {}
    for r in range(1, len(qubits)):
        for part in combinations(qubits, r):
            key = tuple(qubits.index(q) for q in part)
            out[key] = len(part) - len(stabilizers_on(state, list(part)))
    return out


def test_x_on_qubit_1_leaves_a_five_chain(rng):
    # entanglement entropies of every bipartition are local-Clifford invariants
    state = ideal_hexa_state()
    state.measure(PauliString.single(6, 1, "X"), rng)
    assert _entropies(state, [0, 2, 3, 4, 5]) == _entropies(ideal_hexa_state(5), list(range(5)))


@pytest.mark.parametrize("level", [1, 2])
@pytest.mark.parametrize("name", ["cz_single", "cz_double", "teleport", "readout"])
def test_noiseless_gate_gadgets(name, level, rng):
    out, circuit = gadgets.run_gadget(name, level, NoiseModel(0.0), rng)
    assert out.accepted
    assert all(v == 1 for v in logical_expectations(out, circuit))


@pytest.mark.parametrize("name", ["hexa", "encode_zero", "encode_plus"])
def test_noiseless_constructions_level2(name, rng):
    out, circuit = gadgets.run_gadget(name, 2, NoiseModel(0.0), rng)
    assert out.accepted
    assert all(v == 1 for v in logical_expectations(out, circuit))


def test_hexa_target_is_linear_cluster():
    circuit = gadget_circuit("hexa", 1)
    assert len(circuit.outputs) == 6
    ideal = ideal_hexa_state()
    from ftcluster.tableau import same_stabilizer_group

    assert same_stabilizer_group(ideal, circuit.target)


def test_teleport_maps_zero_to_plus(rng):
    out, circuit = one_bit_teleport(1, "zero", rng=rng)
    assert out.accepted
    assert logical_expectations(out, circuit, [PauliString.from_label("X")]) == [1]


def test_cz_single_output_is_logical_cluster(rng):
    out, circuit = verified_cz_single(1, rng=rng)
    xz = logical_expectations(out, circuit, [PauliString.from_label("XZ"), PauliString.from_label("ZX")])
    assert xz == [1, 1]


def test_cz_double_noiseless(rng):
    out, circuit = verified_cz_double(2, rng=rng)
    assert out.accepted and all(v == 1 for v in logical_expectations(out, circuit))


@pytest.mark.parametrize("position", range(7))
def test_planted_x_on_input_rejects(position, rng):
    out, _ = verified_cz_single(1, rng=rng, plant=[("in1", position, "Z")])
    assert not out.accepted


def test_hexa_and_ancilla_wrappers(rng):
    assert build_hexa(1, rng=rng)[0].accepted
    assert build_code_ancilla(2, "plus", rng=rng)[0].accepted
    with pytest.raises(ValueError):
        build_code_ancilla(2, "minus")


@pytest.mark.parametrize("name,level,mode", [("nosuch", 1, "faithful"), ("cz_single", 9, "faithful"),
                                             ("prep_zero", 2, "faithful"), ("hexa", 1, "fast"),
                                             ("cz_single", 1, "sloppy")])
def test_mode_and_level_validation(name, level, mode):
    with pytest.raises((KeyError, ValueError)):
        gadgets.check_mode(name, level, mode)


def test_block_level_convention():
    assert gadgets.GADGETS["hexa"].block_level(2) == 1
    assert gadgets.GADGETS["cz_single"].block_level(2) == 2


def test_fast_blocks_have_expected_error_rate():
    model = NoiseModel(0.03)
    factory = gadgets.BlockFactory(model, "fast")
    x, z = factory(1, "zero", 20000, np.random.default_rng(4))
    from ftcluster import framesim as fs

    xb, zb = fs.unpack(x, 20000), fs.unpack(z, 20000)
    assert abs((xb & ~zb).mean() - 0.002) < 0.0005
    assert abs((zb & ~xb).mean() - 0.004) < 0.0007


def test_faithful_blocks_pass_their_checks():
    from ftcluster import framesim as fs
    from ftcluster import steane

    factory = gadgets.BlockFactory(NoiseModel(0.01), "faithful")
    x, z = factory(1, "zero", 2000, np.random.default_rng(2))
    xb = fs.unpack(x, 2000)
    # faults after the last check leave O(p) detectable X errors, nothing more
    assert steane.top_check(xb, 1).mean() < 0.03
    clean = gadgets.BlockFactory(NoiseModel(0.0), "faithful")(1, "zero", 100, np.random.default_rng(2))
    assert not clean[0].any() and not clean[1].any()
