"""Command-line interface.

Exit codes: 0 success, 2 configuration error, 3 bad input data,
4 mathematical domain error.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

import numpy as np

from .errors import ConfigError, StpairError


def _weights(text: str) -> List[int]:
    lo, sep, hi = text.partition("..")
    try:
        if not sep:
            return [int(lo)]
        return list(range(int(lo), int(hi) + 1))
    except ValueError:
        raise ConfigError(f"weights must look like k1..k2, got {text!r}") from None


def _L(value: str):
    return value if value == "auto" else float(value)


def _window(args):
    from .paircorr import LocalWindow, default_L

    L = float(default_L(args.x)) if args.L == "auto" else float(args.L)
    return LocalWindow(args.psi, L)


def _kernels(args):
    from .smoothing import make_kernel

    return (make_kernel(args.kernel, args.B_rho, args.normalized),
            make_kernel(args.kernel, args.B_g, args.normalized))


def _sequence(args):
    from .io import ingest, newform_sequence, synth_sato_tate
    from .arith.sieve import sieve

    if args.input:
        seqs = ingest(args.input)
        if not seqs:
            raise ConfigError(f"{args.input} holds no records")
        return seqs[0]
    if args.source == "synthetic":
        primes = sieve(args.x, args.level).primes
        return synth_sato_tate(int(primes.size), args.seed, primes)
    return newform_sequence(args.level, args.weight, args.x)


def _write(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_sieve(args) -> int:
    from .arith.sieve import sieve

    table = sieve(args.x, args.level)
    lines = [f"pi_{args.level}({args.x}) = {table.count()}"]
    if args.list:
        lines.extend(str(int(p)) for p in table.primes)
    _write("\n".join(lines) + "\n", args.output)
    return 0


def cmd_trace(args) -> int:
    from .tracefm import format_rational, fullspace_trace, newspace_trace

    value = (fullspace_trace if args.full else newspace_trace)(args.level, args.weight, args.n)
    _write(f"{format_rational(value)} {float(value)!r}\n", args.output)
    return 0


def cmd_dims(args) -> int:
    from .arith.forms import gamma0_cusp_dimension
    from .tracefm import newspace_dimension

    lines = ["weight\tnew\tcusp"]
    for k in _weights(args.weights):
        if k < 2 or k % 2:
            continue
        lines.append(f"{k}\t{newspace_dimension(args.level, k)}\t"
                     f"{gamma0_cusp_dimension(args.level, k)}")
    _write("\n".join(lines) + "\n", args.output)
    return 0


def cmd_angles(args) -> int:
    seq = _sequence(args).upto(args.x)
    lines = ["p\ta_p\ttheta\tH"]
    for p, a, t, h in zip(seq.primes, seq.eigenvalues, seq.thetas, seq.straightened):
        lines.append(f"{int(p)}\t{float(a)!r}\t{float(t)!r}\t{float(h)!r}")
    _write("\n".join(lines) + "\n", args.output)
    return 0


def _report_text(report) -> str:
    from .io import CSV_COLUMNS

    lines = [f"# estimator {report.kind}", f"# label {report.label}", ",".join(CSV_COLUMNS)]
    for s, v, c in zip(report.s, report.values, report.pair_counts):
        lines.append(f"{float(s)!r},{float(v)!r},{int(c)},{report.pi_N},"
                     f"{'' if report.L is None else repr(float(report.L))},"
                     f"{'' if report.A is None else repr(float(report.A))}")
    return "\n".join(lines) + "\n"


def cmd_paircorr(args) -> int:
    from . import paircorr
    from .io import _parse_grid

    seq = _sequence(args)
    s = np.asarray(_parse_grid(args.s_grid))
    if args.kind == "global":
        report = paircorr.global_pair_correlation(seq, args.x, s, args.naive)
    elif args.kind == "local":
        report = paircorr.local_pair_correlation(seq, args.x, _window(args), s, args.naive)
    else:
        report = paircorr.rescaled_local_pair_correlation(seq, args.x, _window(args), s,
                                                          args.naive)
    _write(_report_text(report), args.output)
    return 0


def cmd_smooth(args) -> int:
    from .averaged import predicted_limit
    from .paircorr import smoothed_pair_correlation

    seq = _sequence(args)
    w = _window(args)
    rho, g = _kernels(args)
    value = float(smoothed_pair_correlation(seq, args.x, w, rho, g, args.method))
    limit = float(predicted_limit(w, g, rho))
    _write(f"field,value\nsmoothed_R2,{value!r}\npredicted_limit,{limit!r}\n"
           f"ratio,{value / limit!r}\n", args.output)
    return 0


def cmd_average(args) -> int:
    from .averaged import averaged_R2_via_traces
    from .tracefm import TraceEngine

    w = _window(args)
    rho, g = _kernels(args)
    b = averaged_R2_via_traces(TraceEngine(args.level, args.weight), args.x, w, g, rho)
    lines = ["field,value"]
    for key, value in b.as_dict().items():
        lines.append(f"{key},{float(value)!r}" if isinstance(value, float) else f"{key},{value}")
    _write("\n".join(lines) + "\n", args.output)
    return 0


def cmd_calibrate(args) -> int:
    """Global pair correlation and spacing KS distance of synthetic data against 2s."""
    from .io import _parse_grid, synth_sato_tate
    from .paircorr import global_pair_correlation, level_spacings

    seq = synth_sato_tate(args.n, args.seed)
    x = int(seq.primes[-1])
    s = np.asarray(_parse_grid(args.s_grid))
    report = global_pair_correlation(seq, x, s)
    ks = level_spacings(seq, x).ks_exponential()
    lines = [f"# n {args.n}", f"# seed {args.seed}",
             f"# ks_exponential {ks!r}", "s,value,target"]
    for sv, v in zip(report.s, report.values):
        lines.append(f"{float(sv)!r},{float(v)!r},{2 * float(sv)!r}")
    _write("\n".join(lines) + "\n", args.output)
    return 0


def cmd_synth(args) -> int:
    from .io import emit, synth_sato_tate

    seq = synth_sato_tate(args.n, args.seed)
    if args.output:
        emit([seq], args.output)
    else:
        for p, a in zip(seq.primes, seq.eigenvalues):
            sys.stdout.write(f"{int(p)}\t{float(a)!r}\n")
    return 0


def cmd_config(path: str) -> int:
    from .io import ExperimentConfig, run_experiment

    for out in run_experiment(ExperimentConfig.load(path)):
        print(out)
    return 0


def _add_source(p, x_default=1000):
    p.add_argument("--x", type=int, default=x_default, help="prime bound")
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--weight", type=int, default=12)
    p.add_argument("--source", choices=("synthetic", "newform"), default="newform")
    p.add_argument("--input", help="eigenvalue file; overrides --source")
    p.add_argument("--seed", type=int, default=0)


def _add_window(p):
    p.add_argument("--psi", type=float, default=0.25)
    p.add_argument("--L", type=_L, default="auto", help="number or 'auto'")


def _add_kernel(p):
    p.add_argument("--kernel", choices=("fejer", "bump"), default="fejer")
    p.add_argument("--B-rho", dest="B_rho", type=float, default=1.0)
    p.add_argument("--B-g", dest="B_g", type=float, default=1.0)
    p.add_argument("--normalized", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stpair", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="run the experiment described by a JSON config")
    sub = parser.add_subparsers(dest="command")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write results here instead of stdout")

    p = sub.add_parser("sieve", parents=[common], help="count primes coprime to a level")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_sieve)

    p = sub.add_parser("trace", parents=[common], help="exact Hecke trace")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--weight", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--full", action="store_true", help="full cusp space instead of newspace")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("dims", parents=[common], help="newspace and cusp space dimensions")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--weights", required=True, help="k1..k2")
    p.set_defaults(func=cmd_dims)

    p = sub.add_parser("angles", parents=[common], help="Hecke angles of one form")
    _add_source(p, 100)
    p.set_defaults(func=cmd_angles)

    p = sub.add_parser("paircorr", parents=[common], help="sharp pair correlation")
    p.add_argument("kind", choices=("global", "local", "rescaled"))
    _add_source(p)
    _add_window(p)
    p.add_argument("--s-grid", dest="s_grid", default="0.5:2:4", help="start:stop:num")
    p.add_argument("--naive", action="store_true", help="quadratic reference counter")
    p.set_defaults(func=cmd_paircorr)

    p = sub.add_parser("smooth", parents=[common], help="smoothed pair correlation of one form")
    _add_source(p)
    _add_window(p)
    _add_kernel(p)
    p.add_argument("--method", choices=("fourier", "direct"), default="fourier")
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser("average", parents=[common], help="family-averaged smoothed statistic from traces")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--weight", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    _add_window(p)
    _add_kernel(p)
    p.set_defaults(func=cmd_average)

    p = sub.add_parser("calibrate", parents=[common], help="pair correlation of synthetic data against 2s")
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--s-grid", dest="s_grid", default="0.5:3:6")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("synth", parents=[common], help="synthetic Sato-Tate eigenvalues")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            return cmd_config(args.config)
        if args.command is None:
            parser.print_help()
            return 2
        return args.func(args)
    except StpairError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
