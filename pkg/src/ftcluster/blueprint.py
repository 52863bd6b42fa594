"""Gadget blueprints: a line-oriented description of cluster constructions.

Records (one per line, ``#`` starts a comment)::

    NODE <id> <role> <level>      role: input | oplus | bullet | output
    GATE CZ|CNOT <a> <b>          entangling gate supplied by verified clusters
    GATE H <a>                    transversal Hadamard (noiseless)
    BARECZ <a> <b>                bare transversal C-Z (a wavy line)
    MEASURE X|Z <id> ...          transversal measurement
    CHECK <name> <id> ...         post-select on a clean syndrome of each block

``level`` is ``l`` (the gadget's block level) or an explicit integer.
Fresh ``bullet`` blocks are |0>, every other role starts as |+>.  Measuring a
node in X feeds the decoded outcome forward as a logical X on its last
``GATE CZ`` partner (one-bit teleportation); BARECZ partners never receive
byproducts.  A measured node with neither a check nor a feed target is a
logical readout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import steane
from .circuit import Circuit

ROLES = ("input", "oplus", "bullet", "output")
FUNDAMENTAL = ("hexa", "encode_zero", "encode_plus")


class BlueprintError(ValueError):
    pass


@dataclass
class Blueprint:
    name: str
    nodes: dict[str, str] = field(default_factory=dict)  # id -> role
    levels: dict[str, str] = field(default_factory=dict)  # id -> "l" or int text
    schedule: list[tuple] = field(default_factory=list)

    # -- derived views ----------------------------------------------------------------

    @property
    def outputs(self) -> list[str]:
        return [n for n, role in self.nodes.items() if role == "output"]

    @property
    def checkpoints(self) -> list[tuple[str, tuple[str, ...]]]:
        return [(s[1], s[2]) for s in self.schedule if s[0] == "CHECK"]

    def measured(self) -> dict[str, str]:
        out = {}
        for s in self.schedule:
            if s[0] == "MEASURE":
                for n in s[2]:
                    out[n] = s[1]
        return out

    def feed_targets(self) -> dict[str, str]:
        """Map each X-measured node to the node receiving its byproduct."""
        measured_at = {}
        for i, s in enumerate(self.schedule):
            if s[0] == "MEASURE":
                for n in s[2]:
                    measured_at[n] = (i, s[1])
        targets = {}
        for node, (when, basis) in measured_at.items():
            if basis != "X":
                continue
            partner = None
            for s in self.schedule[:when]:
                if s[0] == "GATE" and s[1] == "CZ" and node in s[2]:
                    partner = s[2][1] if s[2][0] == node else s[2][0]
            if partner is not None:
                targets[node] = partner
        return targets

    def checked(self) -> set[str]:
        return {n for _, ids in self.checkpoints for n in ids}

    # -- text format --------------------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"# blueprint {self.name}"]
        for n, role in self.nodes.items():
            lines.append(f"NODE {n} {role} {self.levels[n]}")
        for s in self.schedule:
            if s[0] == "GATE":
                lines.append(" ".join(["GATE", s[1], *s[2]]))
            elif s[0] == "BARECZ":
                lines.append(" ".join(["BARECZ", *s[1]]))
            elif s[0] == "MEASURE":
                lines.append(" ".join(["MEASURE", s[1], *s[2]]))
            elif s[0] == "CHECK":
                lines.append(" ".join(["CHECK", s[1], *s[2]]))
        return "\n".join(lines) + "\n"


def parse(text: str, name: str = "custom") -> Blueprint:
    bp = Blueprint(name)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        rec, *args = line.split()

        def fail(msg):
            raise BlueprintError(f"line {lineno}: {msg}: {raw.strip()!r}")

        def need_nodes(ids):
            for n in ids:
                if n not in bp.nodes:
                    fail(f"undeclared node {n!r}")

        if rec == "NODE":
            if len(args) != 3:
                fail("NODE takes <id> <role> <level>")
            nid, role, level = args
            if nid in bp.nodes:
                fail("duplicate node")
            if role not in ROLES:
                fail(f"unknown role {role!r}")
            if level != "l" and not level.isdigit():
                fail("level must be 'l' or a non-negative integer")
            bp.nodes[nid] = role
            bp.levels[nid] = level
        elif rec == "GATE":
            if not args:
                fail("GATE needs a kind")
            kind, ids = args[0], tuple(args[1:])
            arity = {"CZ": 2, "CNOT": 2, "H": 1}.get(kind)
            if arity is None:
                fail(f"unknown gate {kind!r}")
            if len(ids) != arity or len(set(ids)) != arity:
                fail(f"GATE {kind} takes {arity} distinct node(s)")
            need_nodes(ids)
            bp.schedule.append(("GATE", kind, ids))
        elif rec == "BARECZ":
            if len(args) != 2 or args[0] == args[1]:
                fail("BARECZ takes two distinct nodes")
            need_nodes(args)
            bp.schedule.append(("BARECZ", tuple(args)))
        elif rec == "MEASURE":
            if len(args) < 2 or args[0] not in ("X", "Z"):
                fail("MEASURE takes a basis X|Z and at least one node")
            need_nodes(args[1:])
            bp.schedule.append(("MEASURE", args[0], tuple(args[1:])))
        elif rec == "CHECK":
            if len(args) < 2:
                fail("CHECK takes a name and at least one node")
            need_nodes(args[1:])
            bp.schedule.append(("CHECK", args[0], tuple(args[1:])))
        else:
            fail(f"unknown record {rec!r}")
    return bp


def lint(bp: Blueprint) -> list[str]:
    """Return a list of violated blueprint invariants (empty when legal)."""
    problems = []
    bare_count = {n: 0 for n in bp.nodes}
    measured_at: dict[str, int] = {}
    for i, s in enumerate(bp.schedule):
        if s[0] in ("GATE", "BARECZ"):
            ids = s[2] if s[0] == "GATE" else s[1]
            for n in ids:
                if n in measured_at:
                    problems.append(f"node {n} is used after its measurement")
            if s[0] == "BARECZ":
                for n in ids:
                    bare_count[n] += 1
        elif s[0] == "MEASURE":
            for n in s[2]:
                if n in measured_at:
                    problems.append(f"node {n} is measured twice")
                measured_at[n] = i
        elif s[0] == "CHECK":
            for n in s[2]:
                if n not in measured_at:
                    problems.append(f"check {s[1]} reads unmeasured node {n}")
    for n, c in bare_count.items():
        if c > 1:
            problems.append(f"node {n} has {c} bare C-Z connections")
    for n in bp.outputs:
        if n in measured_at:
            problems.append(f"output {n} is measured")
    if len(set(bp.levels.values())) > 1:
        problems.append("nodes mix block levels")

    feeds = bp.feed_targets()
    for src, dst in feeds.items():
        if dst in measured_at and measured_at[dst] < measured_at[src]:
            problems.append(f"byproduct of {src} lands on already measured {dst}")
        last_cz = max(i for i, s in enumerate(bp.schedule[:measured_at[src]])
                      if s[0] == "GATE" and s[1] == "CZ" and src in s[2] and dst in s[2])
        for s in bp.schedule[last_cz + 1:measured_at[src]]:
            ids = s[2] if s[0] in ("GATE", "MEASURE") else s[1] if s[0] == "BARECZ" else ()
            if dst in ids:
                problems.append(f"{dst} is touched before the byproduct of {src} arrives")

    if bp.name in FUNDAMENTAL:
        checked = bp.checked()
        parent = {dst: src for src, dst in feeds.items()}
        for out in bp.outputs:
            count, node = 0, out
            while node in parent:
                node = parent[node]
                count += node in checked
            if count < 2:
                problems.append(f"output {out} is verified {count} time(s), needs 2")
    return problems


# --- builders -------------------------------------------------------------------------


class Builder:
    def __init__(self, name: str):
        self.bp = Blueprint(name)
        self._counter: dict[str, int] = {}

    def node(self, role: str, prefix: str) -> str:
        k = self._counter.get(prefix, 0) + 1
        self._counter[prefix] = k
        nid = f"{prefix}{k}"
        self.bp.nodes[nid] = role
        self.bp.levels[nid] = "l"
        return nid

    def gate(self, kind: str, *ids: str) -> None:
        self.bp.schedule.append(("GATE", kind, ids))

    def barecz(self, a: str, b: str) -> None:
        self.bp.schedule.append(("BARECZ", (a, b)))

    def measure(self, basis: str, *ids: str) -> None:
        self.bp.schedule.append(("MEASURE", basis, ids))

    def check(self, name: str, *ids: str) -> None:
        self.bp.schedule.append(("CHECK", name, ids))

    def teleport(self, src: str, dst: str) -> None:
        """One-bit teleportation of ``src`` into the |+> block ``dst`` (adds H)."""
        self.gate("CZ", src, dst)
        self.measure("X", src)
        self.check("teleport", src)

    def checked_ancilla(self) -> str:
        """A |+> block whose X errors are screened by a |0> checker."""
        anc = self.node("oplus", "a")
        chk = self.node("bullet", "c")
        self.barecz(anc, chk)
        self.measure("X", chk)
        self.check("ancilla", chk)
        return anc

    def cz_single(self, a: str, b: str) -> tuple[str, str]:
        self.gate("CZ", a, b)
        outs = []
        for src in (a, b):
            dst = self.node("oplus", "a")
            self.teleport(src, dst)
            self.gate("H", dst)
            outs.append(dst)
        return outs[0], outs[1]

    def cz_double(self, a: str, b: str) -> tuple[str, str]:
        self.gate("CZ", a, b)
        outs = []
        for src in (a, b):
            first = self.checked_ancilla()
            second = self.checked_ancilla()
            self.teleport(src, first)
            self.teleport(first, second)
            outs.append(second)
        return outs[0], outs[1]

    def mark_outputs(self, ids) -> None:
        # re-insert so declaration order of outputs follows ``ids``
        for n in ids:
            self.bp.nodes[n] = "output"
        order = [n for n in self.bp.nodes if n not in ids] + list(ids)
        self.bp.nodes = {n: self.bp.nodes[n] for n in order}
        self.bp.levels = {n: self.bp.levels[n] for n in order}


# Hexa chain: the end edges and the middle edge are doubly verified, the other two
# singly; singles run first so every output leaves through a double gadget.
HEXA_SINGLE_EDGES = ((1, 2), (3, 4))
HEXA_DOUBLE_EDGES = ((0, 1), (2, 3), (4, 5))


def build_hexa_blueprint() -> Blueprint:
    b = Builder("hexa")
    cur = [b.node("oplus", "v") for _ in range(6)]
    for i, j in HEXA_SINGLE_EDGES:
        cur[i], cur[j] = b.cz_single(cur[i], cur[j])
    for i, j in HEXA_DOUBLE_EDGES:
        cur[i], cur[j] = b.cz_double(cur[i], cur[j])
    b.mark_outputs(cur)
    return b.bp


# Encoder graph edges split so every code position finishes on a double gadget.
ENCODE_DOUBLE_EDGES = ((0, 2), (1, 5), (3, 4), (3, 6))


def build_encode_blueprint(which: str) -> Blueprint:
    b = Builder(f"encode_{which}")
    cur = [b.node("oplus", "v") for _ in range(7)]
    doubles = set(ENCODE_DOUBLE_EDGES)
    for i, j in steane.ENCODER_EDGES:
        if (i, j) not in doubles:
            cur[i], cur[j] = b.cz_single(cur[i], cur[j])
    for i, j in ENCODE_DOUBLE_EDGES:
        cur[i], cur[j] = b.cz_double(cur[i], cur[j])
    rotate = steane.NON_PIVOTS if which == "zero" else steane.PIVOTS
    for k in rotate:
        b.gate("H", cur[k])
    b.mark_outputs(cur)
    return b.bp


def build_cz_blueprint(kind: str) -> Blueprint:
    b = Builder(f"cz_{kind}")
    x = b.node("input", "in")
    y = b.node("input", "in")
    outs = b.cz_single(x, y) if kind == "single" else b.cz_double(x, y)
    b.mark_outputs(outs)
    return b.bp


def build_teleport_blueprint() -> Blueprint:
    b = Builder("teleport")
    src = b.node("input", "in")
    dst = b.node("oplus", "a")
    b.teleport(src, dst)
    b.mark_outputs([dst])
    return b.bp


def build_readout_blueprint() -> Blueprint:
    """Measure one block in X after a bare C-Z to a fresh |0> partner, with no
    post-selection; the partner's X errors reach the readout as Z errors."""
    b = Builder("readout")
    q = b.node("input", "q")
    partner = b.node("bullet", "p")
    b.barecz(q, partner)
    b.measure("X", q)
    return b.bp


BUILDERS = {
    "hexa": build_hexa_blueprint,
    "cz_single": lambda: build_cz_blueprint("single"),
    "cz_double": lambda: build_cz_blueprint("double"),
    "encode_zero": lambda: build_encode_blueprint("zero"),
    "encode_plus": lambda: build_encode_blueprint("plus"),
    "teleport": build_teleport_blueprint,
    "readout": build_readout_blueprint,
}


def load(name: str) -> Blueprint:
    """Load a shipped blueprint file by gadget name."""
    if name not in BUILDERS:
        raise KeyError(f"unknown gadget {name!r}")
    text = resources.files("ftcluster").joinpath("blueprints", f"{name}.bp").read_text()
    return parse(text, name)


def load_file(path: str | Path, name: str | None = None) -> Blueprint:
    path = Path(path)
    return parse(path.read_text(), name or path.stem)


# --- compilation -------------------------------------------------------------------------


def compile_blueprint(bp: Blueprint, level: int, inputs: dict[str, str] | None = None) -> Circuit:
    """Expand every node into a level-``level`` block of physical qubits."""
    inputs = inputs or {}
    for n, lv in bp.levels.items():
        if lv != "l" and int(lv) != level:
            raise BlueprintError(f"node {n} is fixed at level {lv}, not {level}")
    c = Circuit()
    qubits = {}
    for n, role in bp.nodes.items():
        kind = inputs.get(n, "zero" if role == "bullet" else "plus")
        qubits[n] = c.block(level, kind)
    c.nodes = dict(qubits)
    feeds = bp.feed_targets()
    checked = bp.checked()
    records = {}
    for s in bp.schedule:
        if s[0] == "GATE":
            kind, ids = s[1], s[2]
            if kind == "H":
                c.h(qubits[ids[0]])
            else:
                c.two(kind, qubits[ids[0]], qubits[ids[1]])
        elif s[0] == "BARECZ":
            a, b = s[1]
            c.two("CZ", qubits[a], qubits[b])
        elif s[0] == "MEASURE":
            basis = s[1]
            for n in s[2]:
                records[n] = c.measure(basis, qubits[n])
                if n in feeds:
                    c.feed(level, records[n], "X", qubits[feeds[n]])
                elif n not in checked:
                    c.readout(n, level, records[n])
        elif s[0] == "CHECK":
            for n in s[2]:
                c.check(f"{s[1]}:{n}", level, records[n])
    for n in bp.outputs:
        c.output(n, level, qubits[n])
    return c
