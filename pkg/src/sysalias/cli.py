"""Command-line front end.

Exit codes: 0 success, 1 mathematical failure, 2 I/O or validation error.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import aliasing, io, pipeline
from .errors import SysAliasError, ValidationError
from .linalg import spectral_decompose
from .matfunc import log_branch

EXIT_OK, EXIT_MATH, EXIT_IO = 0, 1, 2


def _positive(value: str) -> float:
    x = float(value)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return x


def _existing(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"input file not found: {p}")
    return p


def _emit(text: str, output) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _write_alias_dir(directory, candidates) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    for c in candidates:
        tag = "_".join(str(x) for x in c.branch)
        io.write_matrix_csv(d / f"alias_class{c.class_id}_j{tag}.csv", c.matrix)


def cmd_simulate(args) -> int:
    A = io.read_matrix_csv(_existing(args.input))
    if args.x0 is not None:
        x0 = np.array([float(v) for v in args.x0.split(",")])
    else:
        x0 = np.random.default_rng(args.seed).standard_normal(A.shape[0])
    traj = pipeline.simulate(A, x0, args.h, args.steps, args.sigma, args.seed)
    if args.output:
        io.write_trajectory_csv(args.output, traj)
        print(f"wrote {traj.N + 1} samples of dimension {traj.n} (h={traj.h}) to {args.output}")
    else:
        sys.stdout.write(io.format_trajectory_csv(traj))
    return EXIT_OK


def cmd_estimate(args) -> int:
    traj = io.read_trajectory_csv(_existing(args.input), h=args.h)
    X1, X2 = pipeline.snapshot_matrices(traj)
    A_d = pipeline.estimate_Ad(X1, X2)
    if args.json:
        _emit(io.dumps({"h": traj.h, "A_d_hat": A_d.tolist()}), args.output)
    elif args.output:
        io.write_matrix_csv(args.output, A_d)
    else:
        for row in A_d:
            print(",".join(repr(float(x)) for x in row))
    return EXIT_OK


def cmd_check_sampling(args) -> int:
    A = io.read_matrix_csv(_existing(args.input))
    w_min = aliasing.min_sampling_frequency(A)
    h_max = aliasing.max_sampling_period(A)
    if args.json:
        out = {"omega_min": w_min, "h_max": h_max}
        if args.h is not None:
            out["h"] = args.h
            out["aliasing"] = bool(args.h > h_max)
        _emit(io.dumps(out), args.output)
    else:
        lines = [f"omega_min = {w_min:.6g} rad/s", f"h_max = {'inf' if math.isinf(h_max) else f'{h_max:.6g}'} s"]
        if args.h is not None:
            lines.append(f"h = {args.h:.6g} s: {'ALIASING' if args.h > h_max else 'no aliasing'}")
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_aliases(args) -> int:
    A_d = io.read_matrix_csv(_existing(args.input))
    dec = spectral_decompose(A_d)
    kappa = args.kappa
    if kappa is None:
        kappa = pipeline.DEFAULT_KAPPA_FACTOR * aliasing.z_weighted_norm(
            dec, log_branch(dec, [0] * dec.p, real=True)
        )
    alias_set = aliasing.enumerate_aliases(dec, args.h, kappa, eps_zero=args.eps_zero)
    if args.alias_dir:
        _write_alias_dir(args.alias_dir, alias_set.candidates)
    _emit(io.dumps(alias_set.to_dict()), args.output)
    return EXIT_OK


def cmd_identify(args) -> int:
    cfg = io.load_json(_existing(args.config)) if args.config else {}
    h = args.h if args.h is not None else cfg.get("h")
    kappa = args.kappa if args.kappa is not None else cfg.get("kappa")
    eps_zero = args.eps_zero if args.eps_zero is not None else cfg.get("eps_zero")
    seed = args.seed if args.seed is not None else cfg.get("seed")
    tol = pipeline.Tolerances(**cfg.get("tolerances", {}))
    traj = io.read_trajectory_csv(_existing(args.input), h=h, noise_sigma=float(cfg.get("noise_sigma", 0.0)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        report = pipeline.identify(traj, kappa=kappa, eps_zero=eps_zero, tol=tol)
    payload = report.to_dict()
    payload["config"] = {"input": Path(args.input).name, "seed": seed}
    if args.alias_dir:
        _write_alias_dir(args.alias_dir, report.alias_set.candidates)
    if args.plot:
        from .plotting import plot_strip

        mats = {"selected": report.best.matrix}
        principal = [c for c in report.alias_set.candidates if not any(c.branch)]
        if principal:
            mats["principal branch"] = principal[0].matrix
        plot_strip(mats, traj.h, args.plot)
    _emit(io.dumps(payload), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sysalias", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        p.add_argument("--input", required=needs_input, help="input CSV file")
        p.add_argument("--output", help="output file (default: stdout)")
        p.add_argument("--seed", type=int, default=None)
        return p

    p = common(sub.add_parser("simulate", help="simulate x' = Ax from a CSV A-matrix"))
    p.add_argument("--h", type=_positive, required=True)
    p.add_argument("--steps", type=int, default=100, help="number of transitions N")
    p.add_argument("--x0", help="comma-separated initial state (default: random from --seed)")
    p.add_argument("--sigma", type=float, default=0.0)
    p.set_defaults(func=cmd_simulate)

    p = common(sub.add_parser("estimate", help="least-squares A_d from a trajectory CSV"))
    p.add_argument("--h", type=_positive)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_estimate)

    p = common(sub.add_parser("check-sampling", help="minimal sampling frequency of an A-matrix"))
    p.add_argument("--h", type=_positive, help="also report whether this period aliases")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check_sampling)

    p = common(sub.add_parser("aliases", help="enumerate system aliases of a CSV A_d"))
    p.add_argument("--h", type=_positive, required=True)
    p.add_argument("--kappa", type=_positive)
    p.add_argument("--eps-zero", type=_positive, dest="eps_zero")
    p.add_argument("--alias-dir", help="write each alias as CSV into this directory")
    p.add_argument("--json", action="store_true", help="accepted for symmetry; output is always JSON")
    p.set_defaults(func=cmd_aliases)

    p = common(sub.add_parser("identify", help="sparsest-alias identification from a trajectory CSV"))
    p.add_argument("--config", help="JSON config (h, kappa, eps_zero, tolerances, seed, noise_sigma)")
    p.add_argument("--h", type=_positive)
    p.add_argument("--kappa", type=_positive)
    p.add_argument("--eps-zero", type=_positive, dest="eps_zero")
    p.add_argument("--plot", help="write the eigenvalue strip picture to this file")
    p.add_argument("--alias-dir", help="write each alias as CSV into this directory")
    p.add_argument("--json", action="store_true", help="accepted for symmetry; output is always JSON")
    p.set_defaults(func=cmd_identify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SysAliasError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MATH
    except (ValidationError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
