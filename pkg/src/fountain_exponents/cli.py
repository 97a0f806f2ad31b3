"""``fountain-exponents`` command line: exponent curves, simulation sweeps,
verification suites.

Exit codes: 0 success, 1 usage error, 2 infeasible configuration,
3 verification failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .channel import parse_channel
from .codec import CodebookSeed, ConcatConfig, Schedule, received_needed
from .curves import (InfeasibleGrid, check_rates, config_hash, curve_csv, evaluate_curve,
                     parse_curves, parse_rate, rate_grid)
from .exponents import OptimizerGrid, RateNotAchievable, channel_capacity
from .outer import OuterCodeSpec
from .sim import (ExperimentManifest, SweepError, fit_exponent, run_sweep, thread_count, write_results)
from .stats import InsufficientData, two_proportion_pvalue
from .verify import SUITES, run_suites, summary

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _floats(text: str) -> list[str]:
    return [t for t in (s.strip() for s in text.split(",")) if t]


def _echo(doc: dict) -> None:
    print(json.dumps({"resolved_config": doc, "config_hash": config_hash(doc)}, sort_keys=True))


# ---------------------------------------------------------------- exponents

def _usage(fn, *a):
    """Run a parser, turning its ValueError into a usage error."""
    try:
        return fn(*a)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _channel(source: str):
    try:
        return parse_channel(source)
    except (OSError, KeyError, ValueError) as exc:
        raise UsageError(f"cannot load channel {source!r}: {exc}") from None


def cmd_exponents(args) -> int:
    ch, _ = _channel(args.channel)
    cap, _ = channel_capacity(ch)
    curves = _usage(parse_curves, args.curves)
    grid = _usage(OptimizerGrid, args.rho_steps, args.ro_steps, args.refine_rounds, args.tol)
    if args.rates:
        rates = np.array([_usage(parse_rate, r, cap) for r in _floats(args.rates)])
    else:
        rates = rate_grid(cap, points=args.points)
    gammas = (np.array([_usage(float, g) for g in _floats(args.gammas)]) if args.gammas
              else np.linspace(0.05, 0.99, args.points))
    if any(c.gamma_mode for c in curves):
        if cap <= 0:
            raise InfeasibleGrid("channel capacity C_F = 0: the normalized-rate curves are identically 0")
        if np.any((gammas <= 0) | (gammas >= 1)):
            raise UsageError("gammas must lie in (0, 1)")
    if any(not c.gamma_mode for c in curves):
        check_rates(rates, cap)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for spec in curves:
        xs = gammas if spec.gamma_mode else rates
        doc = {"command": "exponents", "channel": ch.transition.tolist(), "curve": spec.label,
               "grid": [args.rho_steps, args.ro_steps, args.refine_rounds, args.tol],
               "x": [float(f"{x:.12g}") for x in xs], "capacity_nats": float(f"{cap:.12g}")}
        _echo(doc)
        pts = evaluate_curve(spec, xs, ch, grid, threads=thread_count())
        path = out / f"{spec.label}.csv"
        path.write_text(curve_csv(spec, pts, [f"config_hash={config_hash(doc)}",
                                              "config=" + json.dumps(doc, sort_keys=True)]), encoding="utf-8")
        written.append(str(path))
    print(json.dumps({"written": written}))
    return EXIT_OK


# ---------------------------------------------------------------- simulate

def _parse_schedule(text: str) -> Schedule:
    kind, _, val = text.partition(":")
    if kind == "prefix" and not val:
        return Schedule("prefix", 1)
    if kind in ("thin", "iid_thinning") and val:
        return _usage(lambda: Schedule("iid_thinning", 1, float(val)))
    if kind in ("starve", "per_code_starve") and val:
        return _usage(lambda: Schedule("per_code_starve", 1, float(val)))
    raise UsageError(f"bad --schedule {text!r}; use prefix, thin:<p_keep> or starve:<fraction>")


def _parse_rc(text: str) -> tuple[int, int]:
    kv = {}
    for part in _floats(text):
        k, _, v = part.partition("=")
        kv[k.strip()] = v.strip()
    try:
        L, known = int(kv.pop("L")), int(kv.pop("known", "1"))
    except (KeyError, ValueError):
        raise UsageError("--rate-compatible needs L=<levels>[,known=<l>]") from None
    if kv:
        raise UsageError(f"unknown --rate-compatible keys {sorted(kv)}")
    if not 0 < known < L:
        raise UsageError("--rate-compatible needs 0 < known < L")
    return L, known


def _factors(text: str) -> list[float]:
    f = [_usage(float, v) for v in _floats(text)]
    if not f or any(v <= 0 for v in f):
        raise UsageError("--factors must be positive numbers")
    return f


def cmd_simulate(args) -> int:
    ch, px = _channel(args.channel)
    cap, _ = channel_capacity(ch)
    schedule = _parse_schedule(args.schedule)
    spec = _usage(OuterCodeSpec, args.n_o, args.k_o, args.field_bits)
    n_i = args.n_i
    if args.rate is not None:
        rate = _usage(parse_rate, args.rate, cap)
        if not 0 < rate < cap:
            raise RateNotAchievable(f"rate {rate:.6g} not in (0, C_F={cap:.6g})")
        n_i = max(1, round(spec.rate * spec.field_bits * math.log(2) / rate))
    factors = _factors(args.factors)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    if args.rate_compatible:
        L, known = _parse_rc(args.rate_compatible)
        if n_i * (L - known) % L:
            raise UsageError(f"n_i={n_i} must be divisible by L/(L-known) so the baseline has an integer n_i")
        rc = ConcatConfig(spec, n_i, ch, px, CodebookSeed(args.seed), levels=L)
        base = ConcatConfig(spec, n_i * (L - known) // L, ch, px, CodebookSeed(args.seed), levels=L - known)
        n_rc = received_needed(rc, known)
        runs = {"rate_compatible": (rc, known, n_rc, args.seed),
                "baseline": (base, 0, base.nominal_n, args.seed + 1)}
        report = {}
        for name, (cfg, k, n0, seed) in runs.items():
            ns = sorted({max(1, round(n0 * f)) for f in factors})
            man = ExperimentManifest(cfg, ns, args.trials, seed, schedule, k)
            _echo(man.to_json())
            est = run_sweep(man)
            write_results(man, est, out / f"{name}.csv")
            report[name] = est
        tests = []
        for a, b in zip(report["rate_compatible"], report["baseline"]):
            p = two_proportion_pvalue(a.failures, a.trials, b.failures, b.trials)
            tests.append({"n_rc": a.n, "n_baseline": b.n, "pe_rc": a.p_hat, "pe_baseline": b.p_hat,
                          "p_value": p, "reject_equal_at_5pct": p < 0.05})
        (out / "equivalence.json").write_text(json.dumps(tests, indent=2) + "\n", encoding="utf-8")
        print(json.dumps(tests))
        return EXIT_OK

    cfg = ConcatConfig(spec, n_i, ch, px, CodebookSeed(args.seed), z_cap=args.z_cap)
    ns = sorted({max(1, round(cfg.nominal_n * f)) for f in factors})
    man = ExperimentManifest(cfg, ns, args.trials, args.seed, schedule)
    _echo(man.to_json())
    est = run_sweep(man, transcript_path=args.transcript)
    write_results(man, est, out / "sweep.csv")
    for e in est:
        print(f"N={e.n} failures={e.failures}/{e.trials} p_hat={e.p_hat:.4g} "
              f"CI=[{e.ci_low:.4g}, {e.ci_high:.4g}]")
    try:
        fit = fit_exponent(est)
        print(f"slope={fit.slope:.6g} +/- {fit.stderr:.3g} per symbol (points N={list(fit.used_n)})")
    except InsufficientData as exc:
        print(f"no slope fit: {exc}")
    return EXIT_OK


# ---------------------------------------------------------------- verify

def cmd_verify(args) -> int:
    ch, _ = _channel(args.channel)
    names = SUITES if args.suite == "all" else (args.suite,)
    _echo({"command": "verify", "channel": ch.transition.tolist(), "suites": list(names),
           "tol": args.tol, "ro": args.ro})
    results = run_suites(names, ch, args.tol, args.ro)
    print(summary(results))
    if args.out:
        Path(args.out).write_text(json.dumps([r.to_json() for r in results], indent=2) + "\n", encoding="utf-8")
    bad = [r for r in results if not r.passed]
    if bad:
        for r in bad:
            for c in r.failures():
                print(f"FAILED {r.name}: {c.name}: observed {c.observed:.6g} vs expected "
                      f"{c.expected:.6g} +/- {c.tol:.3g}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fountain-exponents", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("exponents", help="exponent curves as CSV")
    e.add_argument("--channel", default="bsc:0.1", help="bsc:<p> or a channel JSON path")
    e.add_argument("--curves", default="efc,ec,efc_tilde",
                   help="comma list of efr,efc,efc_tilde,ec,efc_m:<m>,efc_inf,bz_comparison,efcs,efc_gamma")
    e.add_argument("--rates", help="comma list of rates in nats, or fractions of capacity like 0.5c")
    e.add_argument("--gammas", help="comma list of normalized rates for efcs/efc_gamma")
    e.add_argument("--points", type=int, default=32, help="default grid size")
    e.add_argument("--rho-steps", type=int, default=64)
    e.add_argument("--ro-steps", type=int, default=64)
    e.add_argument("--refine-rounds", type=int, default=2)
    e.add_argument("--tol", type=float, default=1e-6)
    e.add_argument("--out", default="curves", help="output directory")
    e.set_defaults(func=cmd_exponents)

    s = sub.add_parser("simulate", help="Monte Carlo error-rate sweep")
    s.add_argument("--channel", default="bsc:0.1")
    s.add_argument("--n-o", type=int, default=64)
    s.add_argument("--k-o", type=int, default=51)
    s.add_argument("--n-i", type=int, default=24)
    s.add_argument("--field-bits", type=int, default=8)
    s.add_argument("--rate", help="target fountain rate (nats or e.g. 0.5c); overrides --n-i")
    s.add_argument("--factors", default="1,1.05,1.1,1.15,1.2",
                   help="received counts as multiples of the nominal N = n_o * n_i")
    s.add_argument("--trials", type=int, default=200)
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--schedule", default="prefix", help="prefix, thin:<p_keep> or starve:<fraction>")
    s.add_argument("--z-cap", type=float, default=2.0)
    s.add_argument("--rate-compatible", help="L=<levels>,known=<l>: compare against the L-l baseline")
    s.add_argument("--transcript", help="JSON-lines trial transcript path")
    s.add_argument("--out", default="sim", help="output directory")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="verification suites")
    v.add_argument("--channel", default="bsc:0.1")
    v.add_argument("--suite", default="all", choices=("all",) + SUITES)
    v.add_argument("--ro", type=float, help="single outer rate for the saddle suite")
    v.add_argument("--tol", type=float, help="override the suite tolerance (negative controls)")
    v.add_argument("--out", help="JSON report path")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help or an argparse error
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasibleGrid, RateNotAchievable, SweepError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        # configuration rejected by a constructor (rate above capacity, bad code parameters, ...)
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
