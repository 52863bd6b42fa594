"""Gadget registry, ideal targets, fresh-block sources and single-trial runs.

A gadget ``level`` is the level of the cluster it delivers.  Construction
gadgets (``hexa``, ``encode_zero``, ``encode_plus``) consume level-``level-1``
blocks; the verified C-Z gates, teleportation and readout act on blocks at
``level`` itself; the level-1 preparations are physical circuits.

Fresh blocks entering a gadget come from one of two sources:

* ``faithful``: level-1 blocks are drawn from a rejection-sampled pool of the
  verified preparation circuit, higher levels from accepted runs of the
  matching ``encode_*`` gadget one level down, recursively;
* ``fast``: ideal code blocks carrying independent physical errors with the
  homogeneous probabilities (eps_X, eps_Y, eps_Z) = (p_XI, p_YI, 2 p_ZI).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import blueprint as bpmod
from . import framesim as fs
from . import steane
from .circuit import Circuit, level1_preparation
from .execute import BlockNoise, VerificationOutcome, run_tableau, stabilizers_on
from .pauli import NoiseModel, PauliString
from .tableau import StabilizerState

MODES = ("faithful", "fast")
MAX_LEVEL = 4


@dataclass(frozen=True)
class GadgetInfo:
    name: str
    kind: str  # "construction" | "gate" | "prep"
    min_level: int

    def block_level(self, level: int) -> int:
        return level - 1 if self.kind == "construction" else level


GADGETS = {
    "hexa": GadgetInfo("hexa", "construction", 1),
    "encode_zero": GadgetInfo("encode_zero", "construction", 1),
    "encode_plus": GadgetInfo("encode_plus", "construction", 1),
    "cz_single": GadgetInfo("cz_single", "gate", 1),
    "cz_double": GadgetInfo("cz_double", "gate", 1),
    "teleport": GadgetInfo("teleport", "gate", 1),
    "readout": GadgetInfo("readout", "gate", 1),
    "prep_zero": GadgetInfo("prep_zero", "prep", 1),
    "prep_plus": GadgetInfo("prep_plus", "prep", 1),
}


def gadget_info(name: str, level: int) -> GadgetInfo:
    if name not in GADGETS:
        raise KeyError(f"unknown gadget {name!r}; choose from {', '.join(GADGETS)}")
    info = GADGETS[name]
    if info.kind == "prep" and level != 1:
        raise ValueError(f"{name} is the level-1 preparation circuit")
    if not info.min_level <= level <= MAX_LEVEL:
        raise ValueError(f"{name} supports levels {info.min_level}..{MAX_LEVEL}, got {level}")
    return info


def check_mode(name: str, level: int, mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    info = gadget_info(name, level)
    if mode == "fast" and info.block_level(level) < 1:
        raise ValueError(f"fast mode needs encoded input blocks; {name} at level {level} uses physical qubits")


# --- circuits and their ideal targets ------------------------------------------------


def ideal_target(bp: bpmod.Blueprint, inputs: dict[str, str] | None = None) -> list[PauliString]:
    """Signed stabilizer group of the noiseless output, one qubit per output node."""
    circuit = bpmod.compile_blueprint(bp, 0, inputs)
    out = run_tableau(circuit, NoiseModel(0.0), np.random.default_rng(0))
    return stabilizers_on(out.state, [int(b.qubits[0]) for b in circuit.outputs])


@lru_cache(maxsize=64)
def _circuit_cached(name: str, level: int, inputs: tuple) -> Circuit:
    info = gadget_info(name, level)
    if info.kind == "prep":
        return level1_preparation(name.split("_")[1])
    bp = bpmod.load(name)
    circuit = bpmod.compile_blueprint(bp, info.block_level(level), dict(inputs))
    circuit.target = ideal_target(bp, dict(inputs))
    return circuit


def gadget_circuit(name: str, level: int, inputs: dict[str, str] | None = None) -> Circuit:
    """Compiled physical circuit with ``target`` set (shared; do not mutate)."""
    return _circuit_cached(name, level, tuple(sorted((inputs or {}).items())))


def planted(circuit: Circuit, node: str | None, position: int, label: str,
            qubit: int | None = None) -> Circuit:
    """Copy of ``circuit`` with a Pauli planted on a fresh block before any gate.

    Address the qubit either by blueprint ``node`` and physical ``position``
    inside it, or directly by ``qubit``.
    """
    if qubit is None:
        qubit = int(circuit.nodes[node][position])
    first_gate = next(i for i, op in enumerate(circuit.ops) if op[0] not in ("INIT", "BLOCK"))
    copy = Circuit(**{**circuit.__dict__, "ops": list(circuit.ops)})
    copy.ops.insert(first_gate, ("ERR", label, np.array([qubit])))
    return copy


def output_qubits(circuit: Circuit) -> np.ndarray:
    return np.concatenate([b.qubits for b in circuit.outputs])


# --- fresh-block sources ---------------------------------------------------------------


class BlockFactory:
    """Source of verified fresh blocks for the frame simulator.

    The factory is stateless across calls apart from the acceptance estimate
    used to size rejection-sampling batches, so create one per RNG stream.
    """

    def __init__(self, model: NoiseModel, mode: str = "faithful", batch_floor: int = 256):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        self.model = model
        self.mode = mode
        self.batch_floor = batch_floor
        self._accept: dict[tuple[int, str], float] = {}
        self.eps = homogeneous_eps(model)

    @property
    def noiseless(self) -> bool:
        return self.model.pair_total() == 0 and self.model.p_M == 0

    def __call__(self, level: int, kind: str, shots: int, rng: np.random.Generator):
        size = steane.block_size(level)
        if level == 0 or self.noiseless:
            w = np.zeros((size, fs.n_words(shots)), dtype=np.uint64)
            return w, w.copy()
        if self.mode == "fast":
            return fs.sample_iid_errors(size, shots, self.eps, rng)
        return self.verified(level, kind, shots, rng)

    def producer(self, level: int, kind: str) -> Circuit:
        if level == 1:
            return gadget_circuit(f"prep_{kind}", 1)
        return gadget_circuit(f"encode_{kind}", level)

    def verified(self, level: int, kind: str, shots: int, rng: np.random.Generator):
        circuit = self.producer(level, kind)
        qs = output_qubits(circuit)
        xs, zs = [], []
        got, attempts = 0, 0
        while got < shots:
            est = self._accept.get((level, kind), 0.9 if level == 1 else 0.5)
            batch = max(self.batch_floor, int((shots - got) / max(est, 1e-3) * 1.1) + 64)
            res = fs.run_frames(circuit, self.model, batch, rng, source=self, keep_frames=True)
            keep = fs.unpack(res.accepted, batch)
            n_acc = int(keep.sum())
            self._accept[(level, kind)] = max(n_acc / batch, 1e-3)
            if n_acc:
                xs.append(fs.unpack(res.x[qs], batch)[:, keep])
                zs.append(fs.unpack(res.z[qs], batch)[:, keep])
                got += n_acc
            attempts += 1
            if attempts > 50 and got == 0:
                raise RuntimeError(f"level-{level} |{kind}> preparation never accepted; noise too high")
        x = np.concatenate(xs, axis=1)[:, :shots]
        z = np.concatenate(zs, axis=1)[:, :shots]
        return fs.pack(x), fs.pack(z)

    def block_noise(self) -> BlockNoise:
        """Per-trial block errors for the tableau executor."""

        def draw(level, kind, rng):
            if level == 0 or self.noiseless:
                return None
            bx, bz = self(level, kind, 1, rng)
            x = fs.unpack(bx, 1)[:, 0]
            z = fs.unpack(bz, 1)[:, 0]
            return PauliString.from_bits(x, z)

        return draw


def homogeneous_eps(model: NoiseModel) -> tuple[float, float, float]:
    return (model.p("XI"), model.p("YI"), 2 * model.p("ZI"))


# --- single trials on the tableau --------------------------------------------------------


def run_gadget(name: str, level: int, model: NoiseModel | None = None,
               rng: np.random.Generator | None = None, mode: str = "faithful",
               inputs: dict[str, str] | None = None,
               plant: list[tuple] | None = None) -> tuple[VerificationOutcome, Circuit]:
    """One tableau trial of a registered gadget.

    ``plant`` lists ``(node, position, label)`` errors placed on fresh blocks
    before the first gate.
    """
    model = model or NoiseModel(0.0)
    rng = rng if rng is not None else np.random.default_rng()
    check_mode(name, level, mode)
    circuit = gadget_circuit(name, level, inputs)
    for node, position, label in plant or ():
        circuit = planted(circuit, node, position, label)
    noise = BlockFactory(model, mode).block_noise()
    return run_tableau(circuit, model, rng, block_noise=noise), circuit


def ideal_hexa_state(n_logical: int = 6) -> StabilizerState:
    """Linear cluster on ``n_logical`` qubits: K_i = Z_{i-1} X_i Z_{i+1}."""
    if n_logical < 1:
        raise ValueError("need at least one qubit")
    state = StabilizerState(n_logical)
    for q in range(n_logical):
        state.apply("H", q)
    for q in range(n_logical - 1):
        state.apply("CZ", q, q + 1)
    return state


def one_bit_teleport(level: int = 1, source: str = "zero", model: NoiseModel | None = None,
                     rng: np.random.Generator | None = None, mode: str = "faithful",
                     plant=None) -> tuple[VerificationOutcome, Circuit]:
    """Teleport a fresh |0>/|+> block through a |+> block; the output carries H|source>."""
    return run_gadget("teleport", level, model, rng, mode, {"in1": source}, plant)


def verified_cz_single(level: int = 1, model: NoiseModel | None = None, rng=None,
                       inputs: dict[str, str] | None = None, mode: str = "faithful", plant=None):
    return run_gadget("cz_single", level, model, rng, mode, inputs, plant)


def verified_cz_double(level: int = 1, model: NoiseModel | None = None, rng=None,
                       inputs: dict[str, str] | None = None, mode: str = "faithful", plant=None):
    return run_gadget("cz_double", level, model, rng, mode, inputs, plant)


def build_hexa(level_plus_1: int, model: NoiseModel | None = None, rng=None,
               mode: str = "faithful", plant=None):
    return run_gadget("hexa", level_plus_1, model, rng, mode, None, plant)


def build_code_ancilla(level_plus_1: int, which: str, model: NoiseModel | None = None, rng=None,
                       mode: str = "faithful", plant=None):
    if which not in ("zero", "plus"):
        raise ValueError("which must be 'zero' or 'plus'")
    return run_gadget(f"encode_{which}", level_plus_1, model, rng, mode, None, plant)


def verify_level1_preparation(which: str = "zero", model: NoiseModel | None = None, rng=None,
                              plant: list[tuple[int, str]] | None = None) -> VerificationOutcome:
    """Noisy encoder plus transversal verification of a level-1 |0>/|+>.

    ``plant`` lists ``(data_qubit, label)`` errors placed after encoding.
    """
    model = model or NoiseModel(0.0)
    rng = rng if rng is not None else np.random.default_rng()
    circuit = level1_preparation(which)
    if plant:
        first_check = next(i for i, op in enumerate(circuit.ops) if op[0] == "CNOT")
        for k, (q, label) in enumerate(plant):
            circuit.ops.insert(first_check + k, ("ERR", label, np.array([q])))
    return run_tableau(circuit, model, rng, abort_on_reject=False)


def extract_syndrome_transversal(basis: str, data: str = "zero", model: NoiseModel | None = None,
                                 rng=None, plant: list[tuple[int, str]] | None = None,
                                 level: int = 1) -> steane.Syndrome:
    """One transversal syndrome round on a fresh data block.

    ``basis="Z"`` couples a |0> ancilla by CNOT data->ancilla and reads it in Z
    (flags X errors); ``basis="X"`` couples a |+> ancilla by CNOT
    ancilla->data and reads it in X (flags Z errors).
    """
    if basis not in ("X", "Z"):
        raise ValueError("basis must be 'X' or 'Z'")
    model = model or NoiseModel(0.0)
    rng = rng if rng is not None else np.random.default_rng()
    c = Circuit()
    d = c.block(level, data)
    a = c.block(level, "zero" if basis == "Z" else "plus")
    for q, label in plant or ():
        c.plant(label, d[q])
    if basis == "Z":
        c.two("CNOT", d, a)
    else:
        c.two("CNOT", a, d)
    rec = c.measure(basis, a)
    c.check("syndrome", level, rec)
    out = run_tableau(c, model, rng, abort_on_reject=False)
    return out.syndromes["syndrome"]
