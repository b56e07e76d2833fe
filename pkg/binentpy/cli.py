# -*- coding: utf-8 -*-
"""
Command line interface, one program with subcommands:

    binentpy alpha --k 2 --tol 1e-12 [--json]
    binentpy verify --k 2 [--exclusion 1e-3] [--depth 40] [--config f.yaml]
    binentpy scan --k 2 --grid 1001 [--out scan.csv]
    binentpy ucs check --family f.txt --k 2 [--samples 100000 --seed 0]
    binentpy ucs exhaustive --n 3 --k 2
    binentpy ucs probe --n 5 --k 3 --trials 1000 --seed 7
    binentpy checks --k 3
    binentpy table --k 1.5 2 3

Results go to standard output, diagnostics (logging, errors) to standard
error. Exit codes: 0 success / certified (up to the zones), 1 falsified
or a violation, 2 inconclusive or not converged, 3 usage or domain error.

(Part of binentpy.)
"""

import argparse
import json
import logging
import sys

from binentpy.alpha_solver import DEFAULT_TOL, SolverError, alpha_table, solve_alpha
from binentpy.inequality_verifier import (CERTIFIED, CERTIFIED_EXCEPT_ZONES,
                                          DEFAULT_DEPTH, DEFAULT_EXCLUSION,
                                          FALSIFIED, CertifyInput, certify,
                                          proof_checks, q_maximum, scan,
                                          write_scan_csv)
from binentpy.scalar_core import DomainError
from binentpy.setfamily_lab import (closure_stats, exhaustive_check,
                                    max_frequency, random_probe, read_family,
                                    sampled_closure_fraction)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FALSIFIED = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 3


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with EXIT_USAGE instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _print_json(data):
    print(json.dumps(data, indent=1))


def cmd_alpha(args):
    cert = solve_alpha(args.k, args.tol)
    if args.json:
        _print_json(cert.to_dict())
    else:
        print(f"alpha_{cert.k:g} in {cert.enclosure}")
        print(f"width {cert.width:.17g}, {cert.iterations} iterations, "
              f"{cert.status}")
        print(f"estimate {cert.estimate:.17g}")
    return EXIT_OK if cert.converged else EXIT_INCONCLUSIVE


def _certify_input(args):
    if args.config is not None:
        inp = CertifyInput.read_yaml(args.config)
    elif args.k is not None:
        inp = CertifyInput(args.k)
    else:
        raise DomainError("verify needs --k or --config")
    # explicit flags win over the file
    for flag, name in (("k", "k"), ("exclusion", "exclusion_radius"),
                       ("depth", "max_depth"), ("tol", "tol"),
                       ("workers", "workers"), ("zone_samples", "zone_samples")):
        value = getattr(args, flag)
        if value is not None:
            setattr(inp, name, value)
    return inp


def cmd_verify(args):
    inp = _certify_input(args)
    report = certify(*inp.all_out(), defect_offset=args.defect_offset)
    if args.json:
        print(report.to_json())
    else:
        print(f"k = {report.k:g}: {report.overall}")
        print(f"alpha in {report.alpha.enclosure}")
        print(f"equality point in {report.equality_point}")
        print(f"min certified margin {report.min_certified_margin:.17g}")
        for status, count in sorted(report.counts().items()):
            print(f"  {status}: {count}")
    if report.overall in (CERTIFIED, CERTIFIED_EXCEPT_ZONES):
        return EXIT_OK
    if report.overall == FALSIFIED:
        return EXIT_FALSIFIED
    return EXIT_INCONCLUSIVE


def cmd_scan(args):
    frame = scan(args.k, args.grid, tol=args.tol)
    if args.out is None:
        sys.stdout.write(write_scan_csv(frame))
        print(f"{len(frame)} rows", file=sys.stderr)
    else:
        write_scan_csv(frame, args.out)
        x, q_max = q_maximum(frame)
        print(f"{len(frame)} rows written to {args.out}, "
              f"max q {q_max:.17g} at x = {x:.17g}")
    return EXIT_OK


def _search_exit(report):
    return EXIT_FALSIFIED if report.violations else EXIT_OK


def _print_search(report, as_json):
    if as_json:
        print(report.to_json())
        return
    print(f"{report.mode} n = {report.n}, k = {report.k}: "
          f"{report.families_checked} families, "
          f"{len(report.violations)} violations")
    if report.min_slack is not None:
        print(f"min slack {report.min_slack:.17g}")
    if report.min_max_freq is not None:
        print(f"min max_freq of union-closed families {report.min_max_freq}")
    for violation in report.violations:
        print(json.dumps(violation))


def _ucs_check_sampled(family, args):
    estimate, error = sampled_closure_fraction(family, args.k, args.samples,
                                               args.seed)
    element, frequency = max_frequency(family)
    if args.json:
        _print_json({"k": args.k, "family_size": len(family),
                     "samples": args.samples, "seed": args.seed,
                     "c_estimate": estimate, "standard_error": error,
                     "max_freq_exact": str(frequency),
                     "max_freq_element": element})
    else:
        print(f"c ~ {estimate:.6f} +- {error:.2e} ({args.samples} samples, "
              f"seed {args.seed})")
        print(f"max_freq = {float(frequency):.17g} ({frequency}), element {element}")
        print("bound not checked for a sampled c")
    return EXIT_OK


def cmd_ucs_check(args):
    family = read_family(args.family)
    if args.samples is not None:
        return _ucs_check_sampled(family, args)
    stats = closure_stats(family, args.k)
    if args.json:
        print(stats.to_json())
    else:
        print(f"c = {float(stats.c):.17g} ({stats.c})")
        print(f"max_freq = {float(stats.max_freq):.17g} ({stats.max_freq}), "
              f"element {stats.max_freq_element}")
        if stats.bound is None:
            print("bound not defined (epsilon >= 1/2 or |F| < 2)")
        else:
            print(f"bound = {stats.bound:.17g}")
        print(f"satisfied = {json.dumps(stats.satisfied)}")
    return EXIT_FALSIFIED if stats.satisfied is False else EXIT_OK


def cmd_ucs_exhaustive(args):
    report = exhaustive_check(args.n, args.k,
                              union_closed_only=args.union_closed_only,
                              workers=args.workers)
    _print_search(report, args.json)
    return _search_exit(report)


def cmd_ucs_probe(args):
    report = random_probe(args.n, args.k, args.trials, args.seed,
                          workers=args.workers)
    _print_search(report, args.json)
    return _search_exit(report)


def cmd_checks(args):
    checks = proof_checks(args.k, grid=args.grid)
    if args.json:
        _print_json([{"check": row.check, "passed": bool(row.passed),
                      "value": format(row.value, ".17g")}
                     for row in checks.itertuples()])
    else:
        for row in checks.itertuples():
            print(f"{row.check:22s} {'pass' if row.passed else 'FAIL'} "
                  f"{row.value:.17g}")
    return EXIT_OK if checks["passed"].all() else EXIT_FALSIFIED


def cmd_table(args):
    frame = alpha_table(args.k, args.tol)
    sys.stdout.write(frame.to_csv(index=False, float_format="%.17g",
                                  lineterminator="\n"))
    return EXIT_OK if (frame["status"] == "converged").all() else EXIT_INCONCLUSIVE


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("-v", "--verbose", action="count",
                        default=argparse.SUPPRESS,
                        help="-v: INFO, -vv: DEBUG logging on stderr")

    parser = _Parser(prog="binentpy", parents=[common],
                     description="Certified generalized binary entropy "
                     "inequality and approximate union-closed families.")
    parser.set_defaults(verbose=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("alpha", parents=[common],
                       help="certified enclosure of alpha_k")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_alpha)

    p = sub.add_parser("verify", parents=[common],
                       help="certify alpha_k h(x^k) >= x^(k-1) h(x)")
    p.add_argument("--k", type=float)
    p.add_argument("--exclusion", type=float,
                   help=f"zone radius (default {DEFAULT_EXCLUSION})")
    p.add_argument("--depth", type=int,
                   help=f"bisection depth limit (default {DEFAULT_DEPTH})")
    p.add_argument("--tol", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--zone-samples", type=int)
    p.add_argument("--config", help="YAML parameter file (CertifyInput)")
    p.add_argument("--json", action="store_true")
    p.add_argument("--defect-offset", type=float, default=0.0,
                   help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan", parents=[common],
                       help="q, D and U(x) - U(x^k) on a grid as CSV")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--grid", type=int, required=True)
    p.add_argument("--out", help="CSV file, standard output if missing")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("ucs", parents=[common],
                       help="approximate union-closed families")
    ucs = p.add_subparsers(dest="ucs_command", required=True)
    c = ucs.add_parser("check", parents=[common], help="statistics of a family file")
    c.add_argument("--family", required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--samples", type=int,
                   help="estimate c from random k-tuples instead of counting")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_ucs_check)
    c = ucs.add_parser("exhaustive", parents=[common],
                       help="all families over [n], n <= 4")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--union-closed-only", action="store_true")
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_ucs_exhaustive)
    c = ucs.add_parser("probe", parents=[common], help="random families over [n]")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--trials", type=int, required=True)
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_ucs_probe)

    p = sub.add_parser("checks", parents=[common],
                       help="numerical run of every step of the proof")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--grid", type=int, default=10_000)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_checks)

    p = sub.add_parser("table", parents=[common],
                       help="alpha_k, equality point and threshold for several k")
    p.add_argument("--k", type=float, nargs="+", required=True)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(func=cmd_table)
    return parser


def _setup_logging(verbose):
    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(verbose, 2)]
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger("binentpy").setLevel(level)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return err.code
    _setup_logging(args.verbose)
    try:
        return int(args.func(args))
    except SolverError as err:
        print(f"binentpy: {err}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (DomainError, OSError) as err:
        print(f"binentpy: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
