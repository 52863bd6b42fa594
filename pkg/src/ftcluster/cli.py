"""``ftcluster`` command line: simulate, sweep, threshold, resources, oracle-check."""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import analytic, gadgets
from . import montecarlo as mc
from . import resources as res
from .pauli import NoiseModel

EXIT_USAGE = 2
EXIT_IO = 3
EXIT_FAILED = 1


class UsageError(ValueError):
    pass


def _default_seed() -> int:
    raw = os.environ.get("FTCLUSTER_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"FTCLUSTER_SEED must be an integer, got {raw!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _size_list(text: str) -> list[analytic.ComputationSize]:
    try:
        return [analytic.ComputationSize.parse(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad computation size in {text!r} (use e.g. 1e20)") from None


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(str(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or fraction, got {text!r}") from None


def _add_noise(p: argparse.ArgumentParser, pe_list: bool = False) -> None:
    if pe_list:
        p.add_argument("--pe", type=_float_list, default=[1e-3], help="comma-separated p_e grid")
    else:
        p.add_argument("--pe", type=float, default=1e-3, help="two-qubit error rate p_e")
    p.add_argument("--pm", type=float, default=None, help="measurement error (default 4 p_e / 15)")


def _add_run(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=None, help="master seed (default $FTCLUSTER_SEED or 0)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--mode", choices=gadgets.MODES, default="faithful")


def _add_out(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=None, help="output file (default: standard output)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ftcluster", description=__doc__)
    parser.add_argument("--config", default=None, help="key=value file; flags override it")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Monte Carlo estimate for one gadget")
    p.add_argument("--gadget", required=True)
    p.add_argument("--level", type=int, default=1)
    _add_noise(p)
    _add_run(p)
    _add_out(p)

    p = sub.add_parser("sweep", help="Monte Carlo over a grid of levels and p_e, one file")
    p.add_argument("--gadget", required=True)
    p.add_argument("--level", type=_int_list, default=[1], help="comma-separated levels")
    _add_noise(p, pe_list=True)
    _add_run(p)
    _add_out(p)

    p = sub.add_parser("threshold", help="analytic threshold, memory-limited variant, empirical bracket")
    _add_noise(p)
    p.add_argument("--D", type=_fraction, default=None, help="override D = p_q0 / p_e")
    p.add_argument("--tau-m", type=float, default=None)
    p.add_argument("--n-steps", type=float, default=None)
    p.add_argument("--N", type=_size_list, default=None, help="computation size, e.g. 1e20")
    p.add_argument("--empirical", action="store_true", help="also bracket the level-1/level-2 crossing")
    p.add_argument("--gadget", default="readout")
    _add_run(p)
    p.set_defaults(mode="fast", trials=200_000)
    _add_out(p)

    p = sub.add_parser("resources", help="resource curve R_0 per fundamental cluster vs N")
    _add_noise(p, pe_list=True)
    p.set_defaults(pe=[1e-2, 1e-3])
    p.add_argument("--N", type=_size_list, default=[analytic.ComputationSize(1.0, k) for k in range(1, 51)])
    p.add_argument("--success-table", default=None,
                   help="CSV alpha,level,p[,source] or the word 'unit'")
    p.add_argument("--overlay", default=None, help="comparison curve CSV with columns N,R")
    p.add_argument("--D", type=_fraction, default=None)
    _add_out(p)

    p = sub.add_parser("oracle-check", help="run the simulator correctness suites")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--corrupt-phase", action="store_true", help=argparse.SUPPRESS)
    return parser


def _read_config(path: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def parse_args(argv: list[str]) -> argparse.Namespace:
    parser = build_parser()
    first = parser.parse_args(argv)
    if first.config is None:
        return first
    config = _read_config(first.config)
    sub = parser._subparsers._group_actions[0].choices[first.command]  # noqa: SLF001
    known = {a.dest for a in sub._actions if a.dest != "help"}  # noqa: SLF001
    unknown = sorted(set(config) - known)
    if unknown:
        raise UsageError(f"unknown config keys for {first.command}: {', '.join(unknown)}")
    for action in sub._actions:  # noqa: SLF001
        if action.dest in config and action.nargs == 0:  # store_true flags
            config[action.dest] = config[action.dest].lower() in ("1", "true", "yes")
    sub.set_defaults(**config)
    return parser.parse_args(argv)


def _model(args, p_e: float) -> NoiseModel:
    kw = {} if args.pm is None else {"p_M": args.pm}
    return NoiseModel(p_e, **kw)


def _seed(args) -> int:
    return _default_seed() if args.seed is None else args.seed


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    Path(out).write_text(text)


def _check_gadget(args, levels) -> None:
    for level in levels:
        try:
            gadgets.check_mode(args.gadget, level, args.mode)
        except (KeyError, ValueError) as exc:
            raise UsageError(str(exc).strip("'\"")) from None
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")


def _render(reports, fmt: str) -> str:
    return mc.reports_to_json(reports) if fmt == "json" else mc.reports_to_csv(reports)


def cmd_simulate(args) -> int:
    _check_gadget(args, [args.level])
    model = _model(args, args.pe)
    rep = mc.run_trials(mc.TrialPlan(args.gadget, args.level, model, args.trials, _seed(args), args.mode),
                        args.jobs)
    text = _render([rep], args.format)
    if args.out is not None:
        _emit(text, args.out)
    print(rep.summary(), file=sys.stdout if args.out else sys.stderr)
    if args.out is None:
        _emit(text, None)
    return 0


def cmd_sweep(args) -> int:
    _check_gadget(args, args.level)
    seed = _seed(args)
    reports = []
    for level in args.level:
        for p_e in args.pe:
            plan = mc.TrialPlan(args.gadget, level, _model(args, p_e), args.trials, seed, args.mode)
            rep = mc.run_trials(plan, args.jobs)
            print(rep.summary(), file=sys.stderr)
            reports.append(rep)
    _emit(_render(reports, args.format), args.out)
    return 0


def cmd_threshold(args) -> int:
    # exact rationals so D prints as a fraction
    kw = {} if args.pm is None else {"p_M": Fraction(repr(args.pm))}
    model = NoiseModel(Fraction(repr(args.pe)), **kw)
    params = analytic.threshold(model, args.D)
    result = {"D": str(params.D), "p_th": float(params.p_th)}
    lines = [f"D={params.D} p_th={float(params.p_th):.4f}",
             f"p_th exact = {params.p_th} ~ {float(params.p_th):.4g}"]
    if args.tau_m is not None or args.n_steps is not None:
        if args.tau_m is None or args.n_steps is None:
            raise UsageError("memory threshold needs both --tau-m and --n-steps")
        size = (args.N or [analytic.ComputationSize(1.0, 20)])[0]
        mem = analytic.memory_threshold(size, args.n_steps, args.tau_m, params.D)
        lines.append(f"memory-limited p_th (N={size}, n={args.n_steps:g}, tau_m={args.tau_m:g}, "
                     f"l_bar={mem.l_bar:.3f}): {mem.verbatim:.5f}  "
                     f"[D-adjusted {mem.d_adjusted:.5f}, additive {mem.additive:.5f}]")
        result.update(memory_verbatim=mem.verbatim, memory_d_adjusted=mem.d_adjusted,
                      memory_additive=mem.additive)
    if args.empirical:
        _check_gadget(args, [1, 2])
        try:
            br = mc.find_empirical_threshold(args.gadget, (1, 2), trials=args.trials, seed=_seed(args),
                                             mode=args.mode, jobs=args.jobs)
        except mc.NoCrossingError as exc:
            raise UsageError(f"empirical search: {exc}") from None
        lines.append(f"empirical crossing ({args.gadget}, levels 1/2): [{br.low:.4f}, {br.high:.4f}]"
                     + ("" if br.resolved else " (stopped by statistics)"))
        result.update(empirical_low=br.low, empirical_high=br.high, empirical_resolved=br.resolved)
    print("\n".join(lines))
    if args.out is not None:
        if args.format == "json":
            text = json.dumps(result, indent=2) + "\n"
        else:
            text = "key,value\n" + "".join(f"{k},{mc._fmt(v)}\n" for k, v in result.items())  # noqa: SLF001
        _emit(text, args.out)
    return 0


def _success_table(spec: str | None) -> res.SuccessTable:
    if spec is None:
        raise UsageError("--success-table is required (success probabilities below level 3 have no "
                         "default); pass a CSV file or 'unit'")
    if spec == "unit":
        return res.SuccessTable.unit()
    return res.SuccessTable.from_csv(Path(spec).read_text())


def cmd_resources(args) -> int:
    table = _success_table(args.success_table)
    overlay = res.parse_overlay(Path(args.overlay).read_text()) if args.overlay else None
    rows = res.resource_curve(args.N, args.pe, table, args.D)
    if args.format == "json":
        conv = lambda v: None if v is None else (str(v) if not isinstance(v, (int, float, Fraction))  # noqa: E731
                                                 else res._emit(v))  # noqa: SLF001
        text = json.dumps({"quantity": "R_0 per fundamental cluster",
                           "rows": [{k: conv(v) for k, v in r.items()} for r in rows],
                           "overlay": overlay}, indent=2) + "\n"
    else:
        text = res.curve_to_csv(rows, overlay)
    print("# R_0 per fundamental cluster", file=sys.stderr)
    _emit(text, args.out)
    return 0


def cmd_oracle_check(args) -> int:
    from . import validation

    seed = 7 if args.seed is None and "FTCLUSTER_SEED" not in os.environ else _seed(args)
    if args.corrupt_phase:
        with validation.corrupted_phase():
            suite = validation.run_suite(args.quick, seed)
    else:
        suite = validation.run_suite(args.quick, seed)
    print("\n".join(suite.lines()))
    print("oracle-check: " + ("PASS" if suite.passed else "FAIL"))
    return 0 if suite.passed else EXIT_FAILED


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "threshold": cmd_threshold,
    "resources": cmd_resources,
    "oracle-check": cmd_oracle_check,
}


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parse_args(argv)
        return COMMANDS[args.command](args)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)
    except (UsageError, ValueError, KeyError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"ftcluster: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"ftcluster: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
