"""Resource recurrences for verified logical clusters, with success-probability weighting.

Objects: ``S``/``D`` (C-Z with single/double verification), the fundamental
clusters ``h``, ``0``, ``+`` and ``b`` (a bare transversal C-Z, R_b = 7**l).
Arithmetic is exact (``Fraction``) until values are emitted.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real

from . import analytic
from .pauli import NoiseModel

OBJECTS = ("S", "D", "h", "0", "+", "b")
CLUSTERS = ("h", "0", "+")
# (n^S, n^D, n^0, n^b) per cluster type
COEFFICIENTS = {"h": (2, 3, 6, 4), "0": (6, 7, 11, 15), "+": (5, 6, 10, 14)}
BASE_COUNTS = {"0": 69, "+": 72}
SOURCES = ("monte-carlo", "user", "asymptotic-one")
CURVE_COLUMNS = ("p_e", "N", "l_bar", "R_0", "R_h", "R_plus", "R_S", "R_D")


class MissingSuccessProbability(KeyError):
    pass


def _exact(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v).limit_denominator(10**12) if isinstance(v, float) else Fraction(v)


@dataclass
class SuccessTable:
    """p_alpha^(l) per cluster type and level; levels >= 3 default to 1."""

    entries: dict[tuple[str, int], tuple[Fraction, str]] = field(default_factory=dict)
    default_from: int = 3

    def set(self, alpha: str, level: int, p: Real, source: str = "user") -> None:
        if alpha not in CLUSTERS:
            raise ValueError(f"unknown cluster type {alpha!r}")
        if source not in SOURCES:
            raise ValueError(f"unknown source tag {source!r}")
        p = _exact(p)
        if not 0 < p <= 1:
            raise ValueError(f"success probability p_{alpha}^({level}) = {float(p)} outside (0, 1]")
        self.entries[(alpha, level)] = (p, source)

    def get(self, alpha: str, level: int) -> Fraction:
        if (alpha, level) in self.entries:
            return self.entries[(alpha, level)][0]
        if level >= self.default_from:
            return Fraction(1)
        raise MissingSuccessProbability(f"p_{alpha}^({level}) must be supplied (no default below level "
                                        f"{self.default_from})")

    def source(self, alpha: str, level: int) -> str:
        if (alpha, level) in self.entries:
            return self.entries[(alpha, level)][1]
        return "asymptotic-one"

    @classmethod
    def unit(cls, up_to: int = 2) -> "SuccessTable":
        t = cls()
        for level in range(1, up_to + 1):
            for alpha in CLUSTERS:
                if level == 1 and alpha == "h":
                    continue
                t.set(alpha, level, 1)
        return t

    @classmethod
    def from_csv(cls, text: str) -> "SuccessTable":
        """Columns: alpha, level, p[, source]."""
        t = cls()
        reader = csv.reader(io.StringIO(text))
        header = None
        for lineno, row in enumerate(reader, start=1):
            if not row or row[0].startswith("#"):
                continue
            if header is None:
                header = [h.strip() for h in row]
                if header[:3] != ["alpha", "level", "p"]:
                    raise ValueError(f"line {lineno}: success table header must start with alpha,level,p")
                continue
            try:
                alpha, level, p = row[0].strip(), int(row[1]), Fraction(row[2].strip())
                source = row[3].strip() if len(row) > 3 and row[3].strip() else "user"
                t.set(alpha, level, p, source)
            except (ValueError, IndexError) as exc:
                raise ValueError(f"line {lineno}: bad success-table row {row!r}: {exc}") from None
        return t

    def to_csv(self) -> str:
        lines = ["alpha,level,p,source"]
        for (alpha, level), (p, source) in sorted(self.entries.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            lines.append(f"{alpha},{level},{p},{source}")
        return "\n".join(lines) + "\n"


@dataclass
class ResourceVector:
    values: dict[tuple[str, int], Fraction] = field(default_factory=dict)

    def __getitem__(self, key: tuple[str, int]) -> Fraction:
        obj, level = key
        if obj == "b":
            return Fraction(7**level)
        if key not in self.values:
            raise KeyError(f"R_{obj}^({level}) has not been computed")
        return self.values[key]

    def __setitem__(self, key: tuple[str, int], value) -> None:
        obj, _ = key
        if obj not in OBJECTS:
            raise ValueError(f"unknown object {obj!r}")
        if obj == "b":
            raise ValueError("R_b is fixed at 7**l")
        if value < 0:
            raise ValueError("resources are non-negative")
        self.values[key] = Fraction(value)

    def has(self, obj: str, level: int) -> bool:
        return obj == "b" or (obj, level) in self.values

    @property
    def top_level(self) -> int:
        return max((lv for _, lv in self.values), default=0)

    def level(self, level: int) -> dict[str, Fraction]:
        return {o: self[(o, level)] for o in OBJECTS if self.has(o, level)}


def level1_base(p0_1: Real = 1, pplus_1: Real = 1) -> ResourceVector:
    """Level-1 values from the physical verification circuits."""
    p0, pp = _exact(p0_1), _exact(pplus_1)
    if p0 <= 0 or pp <= 0:
        raise ValueError("success probability must be positive (resources diverge)")
    if p0 > 1 or pp > 1:
        raise ValueError("success probability above 1")
    vec = ResourceVector()
    vec[("0", 1)] = BASE_COUNTS["0"] / p0
    vec[("+", 1)] = BASE_COUNTS["+"] / pp
    vec[("S", 1)] = 3 * 7 + 2 * vec[("0", 1)]
    vec[("D", 1)] = 9 * 7 + 8 * vec[("0", 1)]
    return vec


def recurrence_step(level: int, vec: ResourceVector, table: SuccessTable) -> ResourceVector:
    """Extend ``vec`` (complete at ``level``) to ``level + 1`` in place."""
    if level < 1:
        raise ValueError("recurrence starts at level 1")
    if level >= 2:
        for obj in ("h", "+"):
            if not vec.has(obj, level):
                raise ValueError(f"R_{obj}^({level}) missing; vector incomplete")
        rh, rp, rb = vec[("h", level)], vec[("+", level)], vec[("b", level)]
        vec[("S", level)] = 7 * rh + 2 * (rp + rb)
        vec[("D", level)] = 3 * 7 * rh + 8 * (rp + rb) + 2 * rb
    for obj in ("S", "D", "0", "+"):
        if not vec.has(obj, level):
            raise ValueError(f"R_{obj}^({level}) missing; vector incomplete")
    # building level 2 from level 1 uses |+> where higher levels use |0>
    r_zero = vec[("+", 1)] if level == 1 else vec[("0", level)]
    for alpha in CLUSTERS:
        n_s, n_d, n_0, n_b = COEFFICIENTS[alpha]
        total = n_s * vec[("S", level)] + n_d * vec[("D", level)] + n_0 * r_zero + n_b * vec[("b", level)]
        vec[(alpha, level + 1)] = total / table.get(alpha, level + 1)
    return vec


def resources_up_to(level: int, table: SuccessTable) -> ResourceVector:
    vec = level1_base(table.get("0", 1), table.get("+", 1))
    for lv in range(1, level):
        recurrence_step(lv, vec, table)
    if level >= 2:  # complete S and D at the top level
        rh, rp, rb = vec[("h", level)], vec[("+", level)], vec[("b", level)]
        vec[("S", level)] = 7 * rh + 2 * (rp + rb)
        vec[("D", level)] = 3 * 7 * rh + 8 * (rp + rb) + 2 * rb
    return vec


@dataclass
class ComputationResources:
    l_bar: int
    vector: ResourceVector
    headline_R0: Fraction


def resources_for_computation(N, model: NoiseModel, table: SuccessTable,
                              D: Real | None = None) -> ComputationResources:
    """Select the highest level for accuracy 0.1/N and evaluate resources up to it.

    Levels below 1 are lifted to 1: the fundamental clusters start there.
    """
    pq0 = analytic.p_q0(model) if D is None else D * model.p_e
    if pq0 >= Fraction(1, analytic.C):
        raise ValueError(f"p_e={float(model.p_e):g} is at or above the threshold; resources diverge")
    l_bar = max(1, analytic.highest_level(N, pq0))
    vec = resources_up_to(l_bar, table)
    return ComputationResources(l_bar, vec, vec[("0", l_bar)])


def resource_curve(N_grid, p_e_list, tables: SuccessTable | dict[float, SuccessTable],
                   D: Real | None = None) -> list[dict]:
    """Rows (p_e, N, l_bar, R_0, R_h, R_plus, R_S, R_D) over the grid."""
    rows = []
    for p_e in p_e_list:
        table = tables[p_e] if isinstance(tables, dict) else tables
        model = NoiseModel(_exact(p_e))
        for N in N_grid:
            size = analytic.ComputationSize.parse(N)
            res = resources_for_computation(size, model, table, D)
            lv = res.l_bar
            vec = res.vector
            rows.append({
                "p_e": p_e,
                "N": size,
                "l_bar": lv,
                "R_0": vec[("0", lv)],
                "R_h": vec[("h", lv)] if vec.has("h", lv) else None,
                "R_plus": vec[("+", lv)],
                "R_S": vec[("S", lv)],
                "R_D": vec[("D", lv)],
            })
    return rows


def _emit(v) -> str:
    if v is None:
        return ""
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else repr(float(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)


def curve_to_csv(rows: list[dict], overlay: list[tuple[str, float]] | None = None,
                 overlay_name: str = "overlay") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    columns = list(CURVE_COLUMNS) + (["series"] if overlay is not None else [])
    w.writerow(columns)
    for r in rows:
        w.writerow([_emit(r[c]) for c in CURVE_COLUMNS] + (["LC"] if overlay is not None else []))
    for n, value in overlay or ():
        w.writerow(["", n, "", _emit(value), "", "", "", "", overlay_name])
    return buf.getvalue()


def parse_overlay(text: str) -> list[tuple[str, float]]:
    """Comparison curve with columns N,R; errors name the offending line."""
    out = []
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cells = [c.strip() for c in line.split(",")]
        if not header_seen:
            if cells != ["N", "R"]:
                raise ValueError(f"overlay line {lineno}: expected header 'N,R', got {line!r}")
            header_seen = True
            continue
        if len(cells) != 2:
            raise ValueError(f"overlay line {lineno}: expected 2 columns, got {len(cells)}")
        try:
            size = analytic.ComputationSize.parse(cells[0])
            value = float(cells[1])
        except ValueError:
            raise ValueError(f"overlay line {lineno}: cannot parse {line!r}") from None
        if value < 0:
            raise ValueError(f"overlay line {lineno}: negative resource")
        out.append((str(size), value))
    if not header_seen:
        raise ValueError("overlay file is empty")
    return out
