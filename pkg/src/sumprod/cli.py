"""Command-line entry point: every experiment as a subcommand.

Each subcommand writes a machine-readable artifact (JSON, plus CSV where
a table is natural) into the output directory and prints a short human
summary.  Outputs carry no timestamps and use sorted JSON keys, so a
fixed config and seed reproduce byte-identical files.

Exit codes: 0 success, 1 an asserted bound failed, 2 configuration
error, 3 capacity/budget error, 4 search budget exhausted
(indeterminate).  Config precedence is CLI flags > config file >
defaults; the resolved values are logged in the artifact header.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings

import numpy as np

from . import __version__
from .averages import SampledFunction
from .coloring import (Coloring, RichnessConfig, extremal_coloring,
                       find_monochromatic, richness_scan)
from .diophantine import (AlmostPrimeFamily, DiophParams, dioph_verify,
                          vino_verify, weyl_structure_scan)
from .errors import CapacityError, DomainError, RangeError
from .numtheory import MultiplicativeTables, sieve_primes
from .projections import NormParams, project, u1_norm, u1log_norm
from .search import sp_number
from .sieve import band_decompose, verify_sieve_bounds
from .suites import (DEFAULT_SEED, SUITE_CONSTANTS, max_ratio, pass_rate,
                     records_to_csv, run_suite, suite_names)

EXIT_OK = 0
EXIT_BOUND_FAILED = 1
EXIT_CONFIG = 2
EXIT_CAPACITY = 3
EXIT_BUDGET = 4


def _write(path: str, text: str):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _emit_json(outdir: str, name: str, payload: dict, header: dict) -> str:
    path = os.path.join(outdir, name)
    _write(path, json.dumps({"config": header, "result": payload},
                            sort_keys=True, indent=1) + "\n")
    return path


def _header(args, keys) -> dict:
    resolved = {k: getattr(args, k) for k in keys if hasattr(args, k)}
    resolved["precedence"] = "cli>config-file>defaults"
    resolved["version"] = __version__
    return resolved


def _load_config_defaults(parser: argparse.ArgumentParser, argv):
    """Apply config-file values as parser defaults (flags still win).

    Subparsers parse into their own namespace, so the defaults must be
    installed on every subcommand parser as well.
    """
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, _ = probe.parse_known_args(argv)
    if known.config:
        try:
            with open(known.config, "r", encoding="utf-8") as fh:
                values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read config file: {exc}")
        mapped = {k.replace("-", "_"): v for k, v in values.items()}
        parser.set_defaults(**mapped)
        for action in parser._actions:
            if isinstance(action, argparse._SubParsersAction):
                for sub in action.choices.values():
                    sub.set_defaults(**mapped)


# -- subcommand implementations -----------------------------------------


def _cmd_extremal(args) -> int:
    results = []
    ok = True
    rs = range(1, args.r + 1) if args.all_up_to else [args.r]
    for r in rs:
        col = extremal_coloring(r)
        wit = find_monochromatic(col)
        results.append({"r": r, "N": col.N, "witness": None if wit is None
                        else vars(wit)})
        ok = ok and wit is None
        print(f"extremal r={r}: N={col.N}, "
              + ("no monochromatic pair" if wit is None
                 else f"WITNESS {wit}"))
    _emit_json(args.output, "extremal.json",
               {"results": results, "all_clean": ok},
               _header(args, ["r", "all_up_to"]))
    return EXIT_OK if ok else EXIT_BOUND_FAILED


def _cmd_detect(args) -> int:
    with open(args.coloring, "r", encoding="utf-8") as fh:
        col = Coloring.from_rle_json(fh.read())
    wit = find_monochromatic(col)
    payload = {"N": col.N, "r": col.r,
               "witness": None if wit is None else vars(wit)}
    _emit_json(args.output, "detect.json", payload,
               _header(args, ["coloring"]))
    print("no monochromatic pair" if wit is None else f"witness: {wit}")
    return EXIT_OK


def _cmd_threshold(args) -> int:
    if args.r >= 3 and args.time_budget is None:
        args.time_budget = 60.0  # exploratory runs must stay budgeted
    res = sp_number(args.r, nmax=args.nmax,
                    time_budget_s=args.time_budget)
    _write(os.path.join(args.output, "threshold.json"),
           json.dumps({"config": _header(args, ["r", "nmax"]),
                       "result": json.loads(res.to_json())},
                      sort_keys=True, indent=1) + "\n")
    if res.n_star is None:
        print(f"threshold r={args.r}: not found <= {res.exhausted_at} "
              f"({res.note})")
        return EXIT_BUDGET
    print(f"threshold r={args.r}: N*={res.n_star}")
    lower = (3 ** args.r + 7) // 2
    if res.n_star <= lower:
        print(f"  WARNING: N* <= interval-coloring bound {lower}")
        return EXIT_BOUND_FAILED
    return EXIT_OK


def _make_function(kind: str, alpha: float, seed: int, lo: int,
                   hi: int) -> SampledFunction:
    if kind == "const":
        return SampledFunction.constant(1.0, lo, hi)
    if kind == "phase":
        return SampledFunction.from_phase(alpha, lo, hi)
    if kind == "random":
        return SampledFunction.random_disc(np.random.default_rng(seed),
                                           lo, hi)
    raise DomainError(f"unknown function kind {kind!r}")


def _cmd_norms(args) -> int:
    rows = [["q", "H", "u1log", "u1", "u1log_projected"]]
    qs = [int(v) for v in args.q.split(",")]
    hs = [int(v) for v in args.H.split(",")]
    reach = max(q * h for q in qs for h in hs)
    f = _make_function(args.function, args.alpha, args.seed,
                       1 - 2 * reach, args.N + 3 * reach)
    table = []
    for q in qs:
        for h in hs:
            p = NormParams(args.N, q, h)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                nl, nu = u1log_norm(f, p), u1_norm(f, p)
                np_ = u1log_norm(project(f, q, h), p)
            rows.append([q, h, repr(nl), repr(nu), repr(np_)])
            table.append({"q": q, "H": h, "u1log": nl, "u1": nu,
                          "u1log_projected": np_})
    _write(os.path.join(args.output, "norms.csv"),
           "\n".join(",".join(str(c) for c in row) for row in rows) + "\n")
    _emit_json(args.output, "norms.json",
               {"table": [{k: (repr(v) if isinstance(v, float) else v)
                           for k, v in row.items()} for row in table]},
               _header(args, ["N", "q", "H", "function", "alpha", "seed"]))
    print(f"norms table: {len(table)} rows -> norms.csv")
    return EXIT_OK


def _cmd_lemma_check(args) -> int:
    records = run_suite(args.name, seed=args.seed, draws=args.draws)
    csv_text = records_to_csv(records, args.name)
    _write(os.path.join(args.output, f"lemma_{args.name}.csv"), csv_text)
    ceiling = SUITE_CONSTANTS[args.name]
    mr, pr = max_ratio(records), pass_rate(records)
    ok = mr <= ceiling and pr == 1.0
    _emit_json(args.output, f"lemma_{args.name}.json",
               {"draws": args.draws, "max_ratio": repr(mr),
                "pass_rate": pr, "ceiling": ceiling, "ok": ok},
               _header(args, ["name", "seed", "draws"]))
    print(f"lemma-check {args.name}: draws={args.draws} "
          f"max_ratio={mr:.6g} ceiling={ceiling} pass_rate={pr:.3f} "
          f"-> {'ok' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_BOUND_FAILED


def _parse_intervals(text: str) -> list:
    out = []
    for part in text.split(","):
        a, b = part.split(":")
        out.append((int(a), int(b)))
    return out


def _cmd_dioph(args) -> int:
    if args.mode == "vino":
        res = vino_verify(args.alpha, args.T, args.delta1, args.delta2)
        _emit_json(args.output, "vino.json", {
            "hypothesis_holds": res.hypothesis_holds, "count": res.count,
            "q": res.q, "alarm": res.alarm},
            _header(args, ["alpha", "T", "delta1", "delta2"]))
        print(f"vino: hypothesis={res.hypothesis_holds} q={res.q} "
              f"alarm={res.alarm}")
        return EXIT_BOUND_FAILED if res.alarm else EXIT_OK
    if args.mode == "weyl":
        tables = MultiplicativeTables.build(args.X)
        rep = weyl_structure_scan(tables, args.X, args.m, args.eps,
                                  exponent=args.exponent,
                                  grid_points=args.grid)
        _write(os.path.join(args.output, "weyl.json"),
               json.dumps({"config": _header(args,
                                             ["X", "m", "eps", "exponent",
                                              "grid"]),
                           "result": json.loads(rep.to_json())},
                          sort_keys=True, indent=1) + "\n")
        print(f"weyl: obligated={len(rep.rows)} all_pass={rep.all_pass} "
              f"empirical_E={rep.empirical_E:.4g}")
        return EXIT_OK if rep.all_pass else EXIT_BOUND_FAILED
    # mode == verify: interval or almost-prime set
    if args.set == "interval":
        S = np.arange(1, args.D + 1)
        D = float(args.D)
    else:
        table = sieve_primes(max(b for _, b in
                                 _parse_intervals(args.intervals)))
        fam = AlmostPrimeFamily.build(_parse_intervals(args.intervals),
                                      args.j, table)
        S = fam.elements
        D = float(fam.product_scale())
    params = DiophParams(args.L, args.Lp, D)
    levels = [float(v) for v in args.levels.split(",")]
    rep = dioph_verify(S, params, levels, grid_points=args.grid,
                       want_empirical_L=args.empirical_L)
    _write(os.path.join(args.output, "dioph.json"),
           json.dumps({"config": _header(args, ["set", "D", "intervals",
                                                "j", "L", "Lp", "levels",
                                                "grid"]),
                       "result": json.loads(rep.to_json())},
                      sort_keys=True, indent=1) + "\n")
    rows = rep.csv_summary_rows()
    _write(os.path.join(args.output, "dioph_summary.csv"),
           "\n".join(",".join(str(c) for c in row) for row in rows) + "\n")
    print(f"dioph: levels={levels} all_pass={rep.all_pass} "
          f"certified={rep.certified} empirical_L={rep.empirical_L}")
    return EXIT_OK if rep.all_pass else EXIT_BOUND_FAILED


def _cmd_sieve(args) -> int:
    if args.R is None:
        args.R = args.X ** 0.25
    dec = band_decompose(args.X, args.R, args.Q, cexp=args.cexp, A=args.A,
                         variant=args.variant)
    rep = verify_sieve_bounds(dec)
    _write(os.path.join(args.output, "sieve_report.json"),
           json.dumps({"config": _header(args, ["X", "R", "Q", "cexp", "A",
                                                "variant"]),
                       "result": json.loads(rep.to_json())},
                      sort_keys=True, indent=1) + "\n")
    if args.export_decomposition:
        _write(os.path.join(args.output, "decomposition.json"),
               dec.export_json() + "\n")
    ok = all(rep.checks.values())
    print(f"sieve X={args.X} R={args.R:.4g} Q={args.Q}: "
          f"floor/logR={rep.majorant_min_prime_over_logR:.3f} "
          f"mean={rep.majorant_mean:.3f} h*Q={rep.h_mean_abs_times_Q:.3f} "
          f"checks={'ok' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_BOUND_FAILED


def _cmd_richness(args) -> int:
    if args.coloring:
        with open(args.coloring, "r", encoding="utf-8") as fh:
            col = Coloring.from_rle_json(fh.read())
    else:
        col = extremal_coloring(args.r)
    cfg = RichnessConfig(V=args.V, imax=args.imax,
                         prime_windows=tuple(_parse_intervals(args.windows)),
                         kmax=args.kmax)
    rep = richness_scan(col, cfg)
    rows = rep.to_csv_rows()
    _write(os.path.join(args.output, "richness.csv"),
           "\n".join(",".join(str(c) for c in row) for row in rows) + "\n")
    _write(os.path.join(args.output, "richness.json"),
           json.dumps({"config": _header(args, ["r", "V", "imax", "windows",
                                                "kmax"]),
                       "result": json.loads(rep.to_json())},
                      sort_keys=True, indent=1) + "\n")
    print(f"richness: N={rep.N} selected color={rep.selected_color} "
          f"hits={rep.hits_per_color}")
    return EXIT_OK


# -- parser --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sumprod",
        description="Desk-scale laboratory for monochromatic {x+y, xy}: "
                    "extremal colorings, exact thresholds, averaging and "
                    "projection defect suites, diophantine spectrum scans, "
                    "and the Selberg-majorant band decomposition.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default parameters")
    common.add_argument("--output", default="sumprod-out",
                        help="output directory for artifacts")
    common.add_argument("--workers", type=int,
                        default=int(os.environ.get("SUMPROD_WORKERS", "1")),
                        help="worker cap; kernels are vectorized and "
                             "deterministic for any value")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    p = add_parser("extremal",
                   help="build the interval coloring of [(3^r+7)/2] "
                        "and verify it has no monochromatic {x+y, xy}")
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--all-up-to", action="store_true",
                   help="verify every r' <= r")
    p.set_defaults(func=_cmd_extremal)

    p = add_parser("detect",
                       help="load a coloring (RLE JSON) and find the least "
                            "monochromatic {x+y, xy} witness")
    p.add_argument("--coloring", required=True)
    p.set_defaults(func=_cmd_detect)

    p = add_parser("threshold",
                       help="smallest N whose pattern graph is not "
                            "r-colorable, with certificates")
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--nmax", type=int, default=None)
    p.add_argument("--time-budget", type=float, default=None)
    p.set_defaults(func=_cmd_threshold)

    p = add_parser("norms",
                       help="progression-bias norm tables (log and uniform) "
                            "and averaging projections")
    p.add_argument("--N", type=int, default=10 ** 4)
    p.add_argument("--q", default="1,2,3,4")
    p.add_argument("--H", default="10,40,160")
    p.add_argument("--function", default="random",
                   choices=["const", "phase", "random"])
    p.add_argument("--alpha", type=float, default=0.37)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=_cmd_norms)

    p = add_parser("lemma-check",
                       help="seeded defect suite for one averaging or "
                            "projection inequality (shift, residue-split, "
                            "frobenius, dilate, elliott, gp-compar, "
                            "almost-period, proj-check, pythagoras, maximal)")
    p.add_argument("--name", required=True, choices=suite_names())
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--draws", type=int, default=200)
    p.set_defaults(func=_cmd_lemma_check)

    p = add_parser("dioph",
                       help="diophantine spectrum scans: exponential-sum "
                            "verification over a grid, the rational-"
                            "approximation counting check, and von Mangoldt "
                            "polynomial-phase structure scans")
    p.add_argument("--mode", default="verify",
                   choices=["verify", "vino", "weyl"])
    p.add_argument("--set", default="interval",
                   choices=["interval", "almostprime"])
    p.add_argument("--D", type=int, default=1000)
    p.add_argument("--intervals", default="1000:1080,10000:10400",
                   help="comma-separated lo:hi prime windows")
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--L", type=float, default=2.0)
    p.add_argument("--Lp", type=float, default=8.0)
    p.add_argument("--levels", default="0.05,0.1,0.2,0.4")
    p.add_argument("--grid", type=int, default=2 ** 22)
    p.add_argument("--empirical-L", action="store_true")
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--T", type=int, default=1000)
    p.add_argument("--delta1", type=float, default=1e-6)
    p.add_argument("--delta2", type=float, default=0.125)
    p.add_argument("--X", type=int, default=10 ** 5)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--eps", type=float, default=0.2)
    p.add_argument("--exponent", type=float, default=6.0)
    p.set_defaults(func=_cmd_dioph)

    p = add_parser("sieve",
                       help="Selberg-type majorant on [X, 2X): Ramanujan "
                            "expansion, periodic head + dyadic band + "
                            "remainder decomposition, bound report")
    p.add_argument("--X", type=int, default=10 ** 5)
    p.add_argument("--R", type=float, default=None,
                   help="sieve level; default X^(1/4) (X^(1/10) is "
                        "degenerate below desk scale)")
    p.add_argument("--Q", type=int, default=6)
    p.add_argument("--cexp", type=float, default=0.125)
    p.add_argument("--A", type=float, default=4.0)
    p.add_argument("--variant", default="mu_squared",
                   choices=["mu_squared", "mu"])
    p.add_argument("--export-decomposition", action="store_true")
    p.set_defaults(func=_cmd_sieve)

    p = add_parser("richness",
                       help="per-color multiple-density table over "
                            "B0 = {V^(4^i)} plus the pair statistic with "
                            "prime windows (scaled-down parameters)")
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--coloring", default=None)
    p.add_argument("--V", type=int, default=2)
    p.add_argument("--imax", type=int, default=2)
    p.add_argument("--windows", default="5:20,20:50")
    p.add_argument("--kmax", type=int, default=2)
    p.set_defaults(func=_cmd_richness)
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    _load_config_defaults(parser, argv)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage, matching the config-error code
        return int(exc.code) if exc.code else EXIT_OK
    if args.workers < 1:
        print("workers must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (DomainError, RangeError, OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
