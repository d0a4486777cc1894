"""Command-line front end.

Usage:
    spindir table [--n-min 2] [--n-max 7] [--format text|csv|json]
    spindir fidelity --strategy O --n 5
    spindir simulate --strategy A --n 3 --samples 1000000 --seed 42 --workers 4
    spindir scan-asymptotics --strategy O --n-max 100
    spindir selfcheck
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from decimal import ROUND_HALF_UP, Decimal

import numpy as np

from . import bruteforce
from .encoding import StrategyTag, product_state
from .fidelity import (
    BESSEL_J0_FIRST_ZERO,
    asymptote,
    closed_form,
    deficit,
    f_antiparallel,
    f_antiparallel_even,
    f_optimal,
    kernel_fidelity,
    strategy_report,
)
from .simulate import estimate_fidelity, povm_density

__all__ = ["main", "format_fidelity"]

SCHEMA_VERSION = 1
STRATEGIES = ("P", "A", "O", "G")
LARGE_N = {"P": "1-1/N", "A": "1-1/(2N)", "O": "1-xi^2/N^2", "G": "1-1/2^N"}
SCALED_DEFICIT = {"P": "N(1-F)", "A": "N(1-F)", "O": "N^2(1-F)", "G": "2^N(1-F)"}
SIM_MAX_N = 20
SIM_MAX_N_GENERAL = 10

EXIT_USAGE = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


class NumericCheckError(Exception):
    pass


def format_fidelity(x: float, places: int = 4) -> str:
    """Round half-up and drop trailing zeros, e.g. 0.8000 -> '0.8'."""
    q = Decimal(repr(float(x))).quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP)
    text = format(q, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text


def _full(x: float) -> str:
    return format(x, ".17g")


def _emit(fmt: str, command: dict, results, text: str, csv_rows: list[list], out) -> None:
    if fmt == "json":
        json.dump({"schema_version": SCHEMA_VERSION, "command": command, "results": results},
                  out, indent=2)
        out.write("\n")
    elif fmt == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\r\n").writerows(csv_rows)
        out.write(buf.getvalue())
    else:
        out.write(text)


def cmd_table(args, out) -> None:
    if not 1 <= args.n_min <= args.n_max <= 60:
        raise UsageError(f"need 1 <= n-min <= n-max <= 60, got {args.n_min}..{args.n_max}")
    ns = list(range(args.n_min, args.n_max + 1))
    values: dict[str, dict[str, float]] = {}
    for s in STRATEGIES:
        row = {}
        for n in ns:
            if s == "A" and n < 2:
                continue
            if s == "G" and n > 62:
                continue
            row[str(n)] = closed_form(s, n)
        values[s] = row
    width = 8
    lines = ["F  " + "".join(f"{n:>{width}}" for n in ns) + f"  {'Large N':<12}"]
    for s in STRATEGIES:
        cells = "".join(f"{format_fidelity(values[s][str(n)]) if str(n) in values[s] else '-':>{width}}"
                        for n in ns)
        lines.append(f"{s:<3}" + cells + f"  {LARGE_N[s]:<12}")
    lines.append(f"xi = {BESSEL_J0_FIRST_ZERO} (first zero of J0)")
    rows = [["strategy", "n", "fidelity", "display"]]
    rows += [[s, n, _full(v), format_fidelity(v)] for s in STRATEGIES for n, v in values[s].items()]
    command = {"name": "table", "n_min": args.n_min, "n_max": args.n_max}
    results = {"fidelity": values, "large_n": LARGE_N, "xi": BESSEL_J0_FIRST_ZERO}
    _emit(args.format, command, results, "\n".join(lines) + "\n", rows, out)


def _check_strategy_n(strategy: StrategyTag, n: int) -> None:
    if n < 1:
        raise UsageError("--n must be at least 1")
    if strategy is StrategyTag.ANTIPARALLEL and n < 2:
        raise UsageError("antiparallel encoding needs --n >= 2")
    if strategy is StrategyTag.GENERAL and n > 62:
        raise UsageError("general encoding supports --n <= 62")
    if strategy is not StrategyTag.GENERAL and n > 120:
        raise UsageError("--n must be at most 120")


def cmd_fidelity(args, out) -> None:
    strategy = StrategyTag.parse(args.strategy)
    _check_strategy_n(strategy, args.n)
    rep = strategy_report(strategy, args.n)
    result = {
        "strategy": strategy.value,
        "n_spins": args.n,
        "f_closed": rep.f_closed,
        "f_kernel": rep.f_kernel,
        "abs_diff": rep.kernel_gap,
    }
    text = (f"strategy {strategy.value}  N={args.n}\n"
            f"  closed form : {_full(rep.f_closed)}  ({format_fidelity(rep.f_closed)})\n"
            f"  kernel      : {'n/a' if rep.f_kernel is None else _full(rep.f_kernel)}\n"
            f"  |difference|: {'n/a' if rep.kernel_gap is None else f'{rep.kernel_gap:.3e}'}\n")
    rows = [list(result), [result["strategy"], args.n, _full(rep.f_closed),
                           "" if rep.f_kernel is None else _full(rep.f_kernel),
                           "" if rep.kernel_gap is None else _full(rep.kernel_gap)]]
    command = {"name": "fidelity", "strategy": strategy.value, "n": args.n}
    _emit(args.format, command, result, text, rows, out)


def cmd_simulate(args, out) -> None:
    strategy = StrategyTag.parse(args.strategy)
    _check_strategy_n(strategy, args.n)
    cap = SIM_MAX_N_GENERAL if strategy is StrategyTag.GENERAL else SIM_MAX_N
    if args.n > cap and not args.force:
        raise UsageError(
            f"simulation capped at N={cap} for strategy {strategy.value} "
            "(rejection acceptance falls roughly as 1/dimension); pass --force to run anyway"
        )
    if args.samples < 1000:
        raise UsageError("--samples must be at least 1000")
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    if not 0 <= args.seed < 2 ** 64:
        raise UsageError("--seed must be an unsigned 64-bit integer")
    rep = estimate_fidelity(strategy, args.n, args.samples, args.seed, args.workers,
                            random_alice=args.random_alice)
    analytic = closed_form(strategy, args.n)
    result = rep.as_dict() | {"analytic": analytic,
                              "z_score": (rep.f_estimate - analytic) / rep.stderr}
    text = (f"strategy {strategy.value}  N={args.n}  samples={rep.samples}  seed={rep.seed}\n"
            f"  estimate   : {rep.f_estimate:.6f} +/- {rep.stderr:.2e}\n"
            f"  analytic   : {analytic:.6f}  (z = {result['z_score']:+.2f})\n"
            f"  acceptance : {rep.acceptance_rate:.4f}\n")
    rows = [list(result), [_full(v) if isinstance(v, float) else v for v in result.values()]]
    command = {"name": "simulate", "strategy": strategy.value, "n": args.n,
               "samples": args.samples, "seed": args.seed, "workers": args.workers,
               "random_alice": args.random_alice}
    _emit(args.format, command, result, text, rows, out)


def cmd_scan_asymptotics(args, out) -> None:
    strategy = StrategyTag.parse(args.strategy)
    limit = 62 if strategy is StrategyTag.GENERAL else 120
    n_min = args.n_min if args.n_min is not None else (2 if strategy is StrategyTag.ANTIPARALLEL else 1)
    if not 1 <= n_min <= args.n_max <= limit:
        raise UsageError(f"need 1 <= n-min <= n-max <= {limit} for strategy {strategy.value}")
    if strategy is StrategyTag.ANTIPARALLEL and n_min < 2:
        raise UsageError("antiparallel encoding needs --n-min >= 2")
    s = strategy.value
    series = []
    for n in range(n_min, args.n_max + 1):
        d = deficit(strategy, n)
        scale = {"P": n, "A": n, "O": n * n, "G": 2.0 ** n}[s]
        series.append({"n": n, "fidelity": closed_form(strategy, n),
                       "asymptote": asymptote(strategy, n), "scaled_deficit": scale * d})
    limit_value = {"P": 1.0, "A": 0.5, "O": BESSEL_J0_FIRST_ZERO ** 2, "G": 1.0}[s]
    lines = [f"strategy {s}: scaled deficit {SCALED_DEFICIT[s]} -> {limit_value:.6f}",
             f"{'N':>4} {'F':>20} {'asymptote':>20} {SCALED_DEFICIT[s]:>12}"]
    lines += [f"{r['n']:>4} {r['fidelity']:>20.15f} {r['asymptote']:>20.15f} {r['scaled_deficit']:>12.6f}"
              for r in series]
    rows = [["n", "fidelity", "asymptote", "scaled_deficit"]]
    rows += [[r["n"], _full(r["fidelity"]), _full(r["asymptote"]), _full(r["scaled_deficit"])]
             for r in series]
    command = {"name": "scan-asymptotics", "strategy": s, "n_min": n_min, "n_max": args.n_max}
    results = {"scaled_deficit": SCALED_DEFICIT[s], "limit": limit_value, "series": series}
    _emit(args.format, command, results, "\n".join(lines) + "\n", rows, out)


def run_selfcheck(n_max: int = 40) -> list[dict]:
    checks = []

    def record(name, err, tol):
        checks.append({"check": name, "max_error": float(err), "tolerance": tol, "ok": bool(err < tol)})

    record("optimal: roots vs kernel eigenvalue",
           max(abs(f_optimal(n) - kernel_fidelity("O", n)) for n in range(1, n_max + 1)), 1e-10)
    record("antiparallel: closed form vs kernel (even N)",
           max(abs(f_antiparallel_even(n) - f_antiparallel(n)) for n in range(2, n_max + 1, 2)), 1e-12)
    record("parallel: kernel vs (N+1)/(N+2)",
           max(abs(kernel_fidelity("P", n) - closed_form("P", n)) for n in range(1, n_max + 1)), 1e-12)
    rng = np.random.default_rng(2024)
    worst = 0.0
    for ups, downs in ((1, 0), (2, 0), (1, 1), (3, 0), (2, 1)):
        t = bruteforce.build_product(ups, downs)
        eff = product_state(ups + downs, t.m)
        for beta in rng.uniform(0, np.pi, 20):
            alpha = rng.uniform(0, 2 * np.pi)
            worst = max(worst, abs(bruteforce.oracle_overlap(t, beta, alpha)
                                   - povm_density(eff, np.cos(beta))))
    record("full-space vs effective POVM density (N<=3)", worst, 1e-10)
    worst = 0.0
    for n in (2, 3, 4):
        for downs in range(0, n // 2 + 1):
            t = bruteforce.build_product(n - downs, downs)
            sa = bruteforce.sector_amplitudes(t)
            eff = product_state(n, t.m)
            got = np.array([sa.get(j, 0.0) for j in eff.sectors])
            worst = max(worst, float(np.max(np.abs(got - eff.amps))))
    record("Clebsch-Gordan sector amplitudes vs product formula (N<=4)", worst, 1e-10)
    return checks


def cmd_selfcheck(args, out) -> None:
    checks = run_selfcheck(args.n_max)
    lines = [f"[{'PASS' if c['ok'] else 'FAIL'}] {c['check']}: "
             f"max error {c['max_error']:.2e} (tol {c['tolerance']:.0e})" for c in checks]
    rows = [["check", "max_error", "tolerance", "ok"]]
    rows += [[c["check"], _full(c["max_error"]), c["tolerance"], c["ok"]] for c in checks]
    command = {"name": "selfcheck", "n_max": args.n_max}
    _emit(args.format, command, checks, "\n".join(lines) + "\n", rows, out)
    if not all(c["ok"] for c in checks):
        raise NumericCheckError("selfcheck failed")


def _strategy(value: str) -> str:
    try:
        return StrategyTag.parse(value).value
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "csv", "json"), default="text")

    parser = argparse.ArgumentParser(
        prog="spindir",
        description="Average fidelities for communicating a direction with N spin-1/2 particles.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("table", parents=[common], help="fidelity table for all four strategies")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=7)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("fidelity", parents=[common], help="closed-form vs kernel fidelity")
    p.add_argument("--strategy", type=_strategy, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo protocol simulation")
    p.add_argument("--strategy", type=_strategy, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--force", action="store_true",
                   help=f"allow N above {SIM_MAX_N} ({SIM_MAX_N_GENERAL} for G); slow")
    p.add_argument("--random-alice", action="store_true",
                   help="also draw Alice's direction instead of fixing it to +z")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("scan-asymptotics", parents=[common], help="approach to the large-N forms")
    p.add_argument("--strategy", type=_strategy, required=True)
    p.add_argument("--n-min", type=int, default=None)
    p.add_argument("--n-max", type=int, required=True)
    p.set_defaults(func=cmd_scan_asymptotics)

    p = sub.add_parser("selfcheck", parents=[common])
    p.add_argument("--n-max", type=int, default=40)
    p.set_defaults(func=cmd_selfcheck)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args, out)
    except (UsageError, ValueError) as exc:
        print(f"spindir: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericCheckError as exc:
        print(f"spindir: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
