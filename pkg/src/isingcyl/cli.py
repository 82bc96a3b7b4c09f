"""Command-line surface: every computation as a subcommand.

Output is CSV (default) or JSON, written to stdout or --output.  Numbers are
emitted with 17 significant digits so a round-trip through text is lossless.
Exit codes: 0 success, 2 validation error, 3 resource cap exceeded.
"""

import argparse
import json
import sys

from . import asymptotics, montecarlo, oracle, partition
from .errors import ResourceLimitError, ValidationError
from .montecarlo import McConfig
from .spectrum import BETA_CRITICAL, LatticeSpec


def _fmt(x):
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _beta_arg(text):
    if text == "critical":
        return BETA_CRITICAL
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"beta must be a decimal or the literal 'critical', got {text!r}"
        )


def _emit(rows, header, fmt, out):
    """rows: list of value tuples aligned with header."""
    if fmt == "json":
        payload = [dict(zip(header, row)) for row in rows]
        if len(payload) == 1:
            payload = payload[0]
        json.dump(payload, out, indent=2, default=_fmt)
        out.write("\n")
    else:
        out.write(",".join(header) + "\n")
        for row in rows:
            out.write(",".join(_fmt(v) for v in row) + "\n")


def _add_common(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", default=None, help="destination path (default stdout)")
    p.add_argument("--threads", type=int, default=1)


def build_parser():
    ap = argparse.ArgumentParser(
        prog="isingcyl",
        description="Exact energy statistics of the critical 2D Ising model "
        "on a 2N x 2M cylinder.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lnz", help="log-partition components and lnZ")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--beta", type=_beta_arg, required=True)
    p.add_argument("--derivatives", action="store_true")
    _add_common(p)

    p = sub.add_parser("moments", help="exact energy mean and variance")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--beta", type=_beta_arg, required=True)
    _add_common(p)

    p = sub.add_parser("mgf", help="log moment generating function ln<e^{sE}>")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--beta", type=_beta_arg, required=True)
    p.add_argument("--s", type=float, required=True)
    _add_common(p)

    p = sub.add_parser("scan", help="CLT convergence scan over a ladder of N")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--N-min", type=int, required=True)
    p.add_argument("--N-max", type=int, required=True)
    p.add_argument("--geometric-step", type=int, default=2)
    p.add_argument("--m-rule", choices=("equal", "over_log_alpha"), default="equal")
    p.add_argument("--alpha", type=float, default=None)
    _add_common(p)

    p = sub.add_parser("bounds", help="lemma bound reports at one (N, M, beta)")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--beta", type=_beta_arg, required=True)
    _add_common(p)

    p = sub.add_parser("oracle", help="exact energy histogram by enumeration")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("mc", help="Monte Carlo energy estimate")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--beta", type=_beta_arg, required=True)
    p.add_argument("--sweeps", type=int, default=10000)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--algorithm", choices=("wolff", "metropolis"), default="wolff")
    p.add_argument("--timeseries", default=None, help="CSV dump of (sweep, energy)")
    _add_common(p)

    return ap


def _run(args, out):
    if args.command == "lnz":
        spec = LatticeSpec(N=args.N, M=args.M)
        lp = partition.log_partition(
            spec, args.beta, with_derivatives=args.derivatives, workers=args.threads
        )
        header = ["L1", "L2", "L3", "L4", "lnZ"]
        row = [lp.L1, lp.L2, lp.L3, lp.L4, lp.lnZ]
        if args.derivatives:
            header += ["dL1", "dL2", "dL3", "dL4", "d2L1", "d2L2", "d2L3", "d2L4"]
            row += list(lp.dL) + list(lp.d2L)
        _emit([row], header, args.format, out)

    elif args.command == "moments":
        spec = LatticeSpec(N=args.N, M=args.M)
        mom = partition.energy_moments(spec, args.beta, workers=args.threads)
        _emit([[mom.mean, mom.variance]], ["mean", "variance"], args.format, out)

    elif args.command == "mgf":
        spec = LatticeSpec(N=args.N, M=args.M)
        k = partition.log_mgf(spec, args.beta, args.s, workers=args.threads)
        _emit([[k]], ["log_mgf"], args.format, out)

    elif args.command == "scan":
        if args.N_min < 2 or args.N_max < args.N_min:
            raise ValidationError("scan requires 2 <= N-min <= N-max")
        if args.geometric_step < 2:
            raise ValidationError("geometric step must be >= 2")
        N_list = []
        n = args.N_min
        while n <= args.N_max:
            N_list.append(n)
            n *= args.geometric_step
        rows = asymptotics.clt_scan(
            args.t, N_list, m_rule=args.m_rule, alpha=args.alpha, workers=args.threads
        )
        _emit(
            [[r.N, r.M, r.t, r.log_mgf, r.residual, r.mean_ratio, r.var_ratio]
             for r in rows],
            ["N", "M", "t", "log_mgf", "residual", "mean_ratio", "var_ratio"],
            args.format,
            out,
        )

    elif args.command == "bounds":
        spec = LatticeSpec(N=args.N, M=args.M)
        reports = asymptotics.bound_suite(spec, args.beta, workers=args.threads)
        _emit(
            [[r.name, r.lhs, r.rhs_scale, r.empirical_constant, r.passed]
             for r in reports],
            ["name", "lhs", "rhs_scale", "empirical_constant", "pass"],
            args.format,
            out,
        )

    elif args.command == "oracle":
        spec = LatticeSpec(N=args.N, M=args.M)
        pmf = oracle.enumerate_pmf(spec, workers=args.threads)
        _emit(
            [[e, pmf.entries[e]] for e in sorted(pmf.entries)],
            ["energy", "count"],
            args.format,
            out,
        )

    elif args.command == "mc":
        spec = LatticeSpec(N=args.N, M=args.M)
        config = McConfig(
            spec=spec,
            beta=args.beta,
            sweeps=args.sweeps,
            burn_in=args.burn_in,
            seed=args.seed,
            algorithm=args.algorithm,
        )
        if args.timeseries:
            est = montecarlo.dump_timeseries(config, args.timeseries)
        else:
            est = montecarlo.run(config)
        _emit(
            [[est.mean, est.mean_stderr, est.variance, est.variance_stderr]],
            ["mean", "mean_stderr", "variance", "variance_stderr"],
            args.format,
            out,
        )


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, which matches our validation code
        return exc.code
    try:
        if args.output:
            with open(args.output, "w", newline="") as fh:
                _run(args, fh)
        else:
            _run(args, sys.stdout)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
