"""Monte Carlo trial engine and estimators.

Trials run in fixed-size chunks of bit-packed Pauli-frame shots.  Chunk ``k``
draws from ``SeedSequence([master_seed, k])``, so results depend only on the
plan, never on how chunks are spread over worker processes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable

import numpy as np
from scipy.stats import binomtest

from . import framesim as fs
from . import gadgets
from .enumeration import OracleResult, enumerate_faults
from .pauli import NoiseModel

DEFAULT_CHUNK = 1 << 15
CSV_COLUMNS = ("gadget", "level", "p_e", "trials", "accepts", "p_hat", "ci_low", "ci_high",
               "cond_err", "cond_err_lo", "cond_err_hi", "frame_rate", "seed")


def wilson(k: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval; the vacuous [0, 1] when ``n == 0``."""
    if n == 0:
        return 0.0, 1.0
    ci = binomtest(k, n).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass(frozen=True)
class TrialPlan:
    gadget: str
    level: int
    model: NoiseModel
    trials: int
    master_seed: int
    mode: str = "faithful"
    plant: tuple = ()  # (node, position, label) errors on fresh blocks
    chunk: int = DEFAULT_CHUNK

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.chunk < 64:
            raise ValueError("chunk must hold at least 64 shots")
        gadgets.check_mode(self.gadget, self.level, self.mode)

    def chunk_sizes(self) -> list[int]:
        full, rest = divmod(self.trials, self.chunk)
        return [self.chunk] * full + ([rest] if rest else [])


@dataclass
class EstimateReport:
    gadget: str
    level: int
    p_e: float
    trials: int
    accepts: int
    p_hat: float
    ci_low: float
    ci_high: float
    cond_err: float
    cond_err_lo: float
    cond_err_hi: float
    frame_rate: float
    seed: int
    errors: int = 0
    frame_errors: int = 0
    mode: str = "faithful"
    check_fired: dict[str, int] = field(default_factory=dict)
    census: dict[str, int] = field(default_factory=dict)

    @property
    def accept_count(self) -> int:
        return self.accepts

    @property
    def trial_count(self) -> int:
        return self.trials

    @property
    def conditional_logical_error(self) -> float:
        return self.cond_err

    @property
    def frame_error_rate(self) -> float:
        return self.frame_rate

    def row(self) -> dict:
        return {c: getattr(self, c) for c in CSV_COLUMNS}

    def summary(self) -> str:
        return (f"{self.gadget} level {self.level} p_e={self.p_e:g}: accepted {self.accepts}/{self.trials} "
                f"p_hat={self.p_hat:.6g} [{self.ci_low:.6g}, {self.ci_high:.6g}]  "
                f"cond_err={self.cond_err:.3g} [{self.cond_err_lo:.3g}, {self.cond_err_hi:.3g}]  "
                f"frame_rate={self.frame_rate:.3g}")


@dataclass
class _Counts:
    trials: int = 0
    accepts: int = 0
    errors: int = 0
    frame_errors: int = 0
    fired: Counter = field(default_factory=Counter)
    census: Counter = field(default_factory=Counter)

    def __iadd__(self, other: "_Counts") -> "_Counts":
        self.trials += other.trials
        self.accepts += other.accepts
        self.errors += other.errors
        self.frame_errors += other.frame_errors
        self.fired.update(other.fired)
        self.census.update(other.census)
        return self


def _circuit_for(plan: TrialPlan):
    circuit = gadgets.gadget_circuit(plan.gadget, plan.level)
    for node, position, label in plan.plant:
        circuit = gadgets.planted(circuit, node, position, label)
    return circuit


def _census(res: fs.FrameResult, n_out: int) -> Counter:
    """Residual logical Pauli on the outputs of accepted shots, keyed by label."""
    if n_out == 0:
        return Counter({"": res.accept_count()})
    keep = fs.unpack(res.accepted, res.shots)
    lx = fs.unpack(res.output_lx, res.shots)[:, keep]
    lz = fs.unpack(res.output_lz, res.shots)[:, keep]
    code = np.zeros(lx.shape[1], dtype=np.int64)
    for i in range(n_out):
        code |= (lx[i].astype(np.int64) | (lz[i].astype(np.int64) << 1)) << (2 * i)
    values, counts = np.unique(code, return_counts=True)
    out = Counter()
    for v, c in zip(values.tolist(), counts.tolist()):
        out["".join("IXZY"[(v >> (2 * i)) & 3] for i in range(n_out))] = c
    return out


def _run_chunk(args: tuple[TrialPlan, int, int]) -> _Counts:
    plan, index, shots = args
    rng = np.random.default_rng(np.random.SeedSequence([plan.master_seed & (2**64 - 1), index]))
    circuit = _circuit_for(plan)
    factory = gadgets.BlockFactory(plan.model, plan.mode)
    res = fs.run_frames(circuit, plan.model, shots, rng, source=factory)
    acc = res.accepted
    return _Counts(
        trials=shots,
        accepts=fs.popcount(acc),
        errors=fs.popcount(acc & res.logical_error),
        frame_errors=fs.popcount(acc & res.frame_error),
        fired=Counter(res.check_fired),
        census=_census(res, len(circuit.outputs)),
    )


def run_trials(plan: TrialPlan, jobs: int = 1) -> EstimateReport:
    """Run ``plan.trials`` independent gadget trials and summarize them."""
    work = [(plan, k, n) for k, n in enumerate(plan.chunk_sizes())]
    total = _Counts()
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(_run_chunk, work):
                total += part
    else:
        for item in work:
            total += _run_chunk(item)
    return _report(plan, total)


def _report(plan: TrialPlan, c: _Counts) -> EstimateReport:
    lo, hi = wilson(c.accepts, c.trials)
    e_lo, e_hi = wilson(c.errors, c.accepts)
    return EstimateReport(
        gadget=plan.gadget,
        level=plan.level,
        p_e=plan.model.p_e,
        trials=c.trials,
        accepts=c.accepts,
        p_hat=c.accepts / c.trials,
        ci_low=lo,
        ci_high=hi,
        cond_err=c.errors / c.accepts if c.accepts else 0.0,
        cond_err_lo=e_lo,
        cond_err_hi=e_hi,
        frame_rate=c.frame_errors / c.accepts if c.accepts else 0.0,
        seed=plan.master_seed,
        errors=c.errors,
        frame_errors=c.frame_errors,
        mode=plan.mode,
        check_fired=dict(sorted(c.fired.items())),
        census=dict(sorted(c.census.items())),
    )


def estimate_logical_error_curve(gadget: str, level: int, p_e_grid: Iterable[float], trials: int,
                                 seed: int, mode: str = "faithful", jobs: int = 1,
                                 model_factory: Callable[[float], NoiseModel] = NoiseModel,
                                 ) -> list[tuple[float, EstimateReport]]:
    """One report per grid point; every point reuses ``seed`` (paired sampling)."""
    grid = [float(p) for p in p_e_grid]
    if not grid:
        raise ValueError("empty p_e grid")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("p_e grid must be sorted ascending")
    return [(p, run_trials(TrialPlan(gadget, level, model_factory(p), trials, seed, mode), jobs))
            for p in grid]


def fit_loglog_slope(p_values, rates) -> float:
    """Least-squares slope of log(rate) against log(p) over points with rate > 0."""
    pts = [(math.log(p), math.log(r)) for p, r in zip(p_values, rates) if r > 0]
    if len(pts) < 2:
        raise ValueError("need at least two points with a nonzero rate")
    x, y = np.array(pts).T
    return float(np.polyfit(x, y, 1)[0])


def frame_error_census(plan: TrialPlan, jobs: int = 1) -> dict[str, int]:
    """Counts of residual logical output frames among accepted trials, by Pauli label."""
    return run_trials(plan, jobs).census


# --- threshold search ----------------------------------------------------------------------


class NoCrossingError(ValueError):
    pass


# (p_e, level, probe index) -> (estimate, ci_low, ci_high)
Estimator = Callable[[float, int, int], tuple[float, float, float]]


@dataclass
class ThresholdBracket:
    low: float
    high: float
    resolved: bool  # False when statistics, not the tolerance, stopped the search
    probes: list[tuple[float, tuple, tuple]] = field(default_factory=list)

    @property
    def width(self) -> float:
        return self.high - self.low

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.low + self.high)


def _sign(est_hi, est_lo) -> int:
    """+1 if the higher level is significantly worse, -1 if better, 0 if unresolved."""
    if est_hi[1] > est_lo[2]:
        return 1
    if est_hi[2] < est_lo[1]:
        return -1
    return 0


def find_crossing(estimator: Estimator, p_range: tuple[float, float], levels=(1, 2),
                  tol: float = 0.005, max_probes: int = 40) -> ThresholdBracket:
    """Bisection on the sign of p_q(upper level) - p_q(lower level)."""
    low, high = sorted(float(v) for v in p_range)
    l_lo, l_hi = levels
    probe = 0
    probes = []

    def measure(p):
        nonlocal probe
        a = estimator(p, l_lo, probe)
        b = estimator(p, l_hi, probe + 1)
        probe += 2
        probes.append((p, a, b))
        return _sign(b, a)

    if measure(low) != -1 or measure(high) != 1:
        raise NoCrossingError(f"no resolved crossing between {low:g} and {high:g}")
    resolved = True
    while high - low > tol and len(probes) < max_probes:
        mid = 0.5 * (low + high)
        s = measure(mid)
        if s == 0:
            resolved = False
            break
        if s < 0:
            low = mid
        else:
            high = mid
    return ThresholdBracket(low, high, resolved, probes)


def monte_carlo_estimator(gadget: str, trials: int, seed: int, mode: str = "fast", jobs: int = 1,
                          model_factory: Callable[[float], NoiseModel] = NoiseModel) -> Estimator:
    """Conditional logical error of ``gadget`` with a fresh derived seed per probe."""

    def estimate(p, level, probe):
        probe_seed = int(np.random.SeedSequence([seed, probe]).generate_state(1, np.uint64)[0])
        rep = run_trials(TrialPlan(gadget, level, model_factory(p), trials, probe_seed, mode), jobs)
        return rep.cond_err, rep.cond_err_lo, rep.cond_err_hi

    return estimate


def find_empirical_threshold(gadget_family: str = "readout", levels=(1, 2),
                             p_range: tuple[float, float] = (0.02, 0.08), trials: int = 200_000,
                             seed: int = 0, tol: float = 0.005, mode: str = "fast",
                             jobs: int = 1) -> ThresholdBracket:
    return find_crossing(monte_carlo_estimator(gadget_family, trials, seed, mode, jobs),
                         p_range, levels, tol)


# --- oracle ---------------------------------------------------------------------------------


def enumeration_oracle(gadget: str, level: int, model: NoiseModel, order: int = 2) -> OracleResult:
    """Fault-path enumeration for a gadget whose fresh blocks are at level <= 1."""
    return enumerate_faults(gadgets.gadget_circuit(gadget, level), model, order)


# --- serialization ---------------------------------------------------------------------------


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def reports_to_csv(reports: Iterable[EstimateReport], extra: dict | None = None) -> str:
    """CSV text; ``extra`` maps additional column names to per-row value lists."""
    reports = list(reports)
    extra = extra or {}
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([*CSV_COLUMNS, *extra])
    for i, r in enumerate(reports):
        row = r.row()
        writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS] + [_fmt(v[i]) for v in extra.values()])
    return buf.getvalue()


def reports_to_json(reports: Iterable[EstimateReport]) -> str:
    return json.dumps([r.row() for r in reports], indent=2) + "\n"


_INT_COLUMNS = {"level", "trials", "accepts", "seed"}


def read_reports_csv(text: str) -> list[dict]:
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        rows.append({k: (int(v) if k in _INT_COLUMNS else v if k == "gadget" else float(v))
                     for k, v in rec.items()})
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(rows[0]))
    for r in rows:
        writer.writerow([_fmt(v) for v in r.values()])
    return buf.getvalue()


def report_dict(report: EstimateReport) -> dict:
    return asdict(report)
