"""Command-line front end.

Subcommands
-----------
sweep     Run a Monte Carlo BER grid and write CSV.
figure    Run one of the canned sweeps (3, 4 or 5) and write CSV.
matrices  Print the carrier matrix, its Gram matrix, and the conditioning.
ops       Print predicted per-block operation counts for a detector.

Usage errors exit with status 2 (argparse's convention); runtime failures
print a diagnostic to stderr and exit with status 1.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .complexity import predicted_ops
from .harness import DETECTOR_NAMES, SweepSpec, figure_spec, run_sweep
from .system import default_config, carrier_matrix

_CONFIG_KEYS = {
    "n", "alpha", "snr_db", "detector", "iterations", "lambda", "d_start",
    "d_end", "min_bits", "min_errors", "seed", "out", "workers",
    "constellation", "mapping",
}
_LIST_KEYS = {"n", "alpha", "snr_db", "detector", "iterations"}


def _parse_config_file(path: str) -> dict:
    """Read sweep settings from a file: JSON, or `key = value` lines."""
    with open(path) as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        raw = json.loads(text)
    else:
        raw = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, value = line.split("=", 1)
            raw[key.strip()] = value.strip()
    out = {}
    for key, value in raw.items():
        key = key.strip().lower().replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{path}: unknown config key {key!r}")
        if key in _LIST_KEYS and isinstance(value, str):
            out[key] = [item.strip() for item in value.split(",") if item.strip()]
        elif key in _LIST_KEYS and not isinstance(value, list):
            out[key] = [value]
        else:
            out[key] = value
    return out


def _add_sweep_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, nargs="+", metavar="N",
                        help="carrier counts (one cell axis)")
    parser.add_argument("--alpha", type=float, nargs="+", metavar="A",
                        help="compression factors in (0, 1]")
    parser.add_argument("--snr-db", type=float, nargs="+", metavar="DB",
                        help="per-subcarrier Es/N0 values in dB")
    parser.add_argument("--detector", nargs="+", choices=DETECTOR_NAMES,
                        help="detectors to sweep")
    parser.add_argument("--iterations", type=int, nargs="+", metavar="K",
                        help="iteration counts for the iterative detector")
    parser.add_argument("--lambda", dest="relaxation", type=float, default=None,
                        metavar="L", help="relaxation weight (default 1.0)")
    parser.add_argument("--d-start", type=float, default=None, metavar="D",
                        help="soft-mapping width at the first iteration (default 1.0)")
    parser.add_argument("--d-end", type=float, default=None, metavar="D",
                        help="soft-mapping width at the last iteration (default 0.0)")
    parser.add_argument("--mapping", choices=("soft", "hard", "none"), default=None,
                        help="per-iteration mapping mode (default soft)")
    parser.add_argument("--constellation", choices=("qam4", "bpsk"), default=None,
                        help="symbol alphabet (default qam4)")
    parser.add_argument("--min-bits", type=int, default=None, metavar="B",
                        help="minimum bits per cell (default 100000)")
    parser.add_argument("--min-errors", type=int, default=None, metavar="E",
                        help="minimum bit errors per cell (default 100)")
    parser.add_argument("--seed", type=int, default=None, metavar="S",
                        help="base seed for per-cell seed derivation (default 1)")
    parser.add_argument("--workers", type=int, default=None, metavar="W",
                        help="worker processes (capped by SEFDM_THREADS, default 1)")
    parser.add_argument("--timing", action="store_true",
                        help="record wall-clock times (breaks byte reproducibility)")
    parser.add_argument("--out", metavar="PATH", help="CSV output path")
    parser.add_argument("--config", metavar="PATH",
                        help="settings file; explicit flags override its values")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sefdm",
        description="Compressed-carrier link simulation and detection benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run a Monte Carlo BER grid")
    _add_sweep_arguments(sweep)

    figure = sub.add_parser("figure", help="run a canned sweep (3, 4 or 5)")
    figure.add_argument("which", type=int, choices=(3, 4, 5))
    figure.add_argument("--iterations", type=int, default=None,
                        help="override the iterative pass count")
    figure.add_argument("--min-bits", type=int, default=None)
    figure.add_argument("--seed", type=int, default=1)
    figure.add_argument("--workers", type=int, default=None)
    figure.add_argument("--timing", action="store_true")
    figure.add_argument("--out", metavar="PATH", help="CSV output path")

    matrices = sub.add_parser("matrices", help="print carrier and Gram matrices")
    matrices.add_argument("--n", type=int, required=True)
    matrices.add_argument("--alpha", type=float, required=True)
    matrices.add_argument("--out", metavar="PATH",
                          help="also save f_matrix/gram/condition as .npz")

    ops = sub.add_parser("ops", help="print predicted per-block operation counts")
    ops.add_argument("--method", choices=("iterative", "ml", "sd"), required=True)
    ops.add_argument("--n", type=int, required=True)
    ops.add_argument("--alpha", type=float, required=True)
    ops.add_argument("--l", dest="l_points", type=int, default=4,
                     help="constellation size (default 4)")
    ops.add_argument("--iterations", type=int, default=1,
                     help="iterative pass count the total covers (default 1)")
    ops.add_argument("--gamma", type=float, default=None,
                     help="search exponent for the sd method")
    return parser


def _merge_sweep_settings(args: argparse.Namespace) -> tuple[SweepSpec, dict]:
    settings: dict = {}
    if args.config:
        settings.update(_parse_config_file(args.config))

    def pick(flag_value, key, cast, default):
        if flag_value is not None:
            return flag_value
        if key in settings:
            value = settings[key]
            return [cast(v) for v in value] if isinstance(value, list) else cast(value)
        return default

    n_list = pick(args.n, "n", int, [8])
    alpha_list = pick(args.alpha, "alpha", float, [1.0])
    snr_list = pick(args.snr_db, "snr_db", float, [10.0])
    detectors = pick(args.detector, "detector", str, ["iterative"])
    iterations = pick(args.iterations, "iterations", int, [10])
    spec = SweepSpec(
        n_list=tuple(n_list),
        alpha_list=tuple(alpha_list),
        snr_db_list=tuple(snr_list),
        detectors=tuple(detectors),
        iterations_list=tuple(iterations),
        min_bits=int(pick(args.min_bits, "min_bits", int, 100_000)),
        min_bit_errors=int(pick(args.min_errors, "min_errors", int, 100)),
        base_seed=int(pick(args.seed, "seed", int, 1)),
        constellation=pick(args.constellation, "constellation", str, "qam4"),
        relaxation=float(pick(args.relaxation, "lambda", float, 1.0)),
        d_start=float(pick(args.d_start, "d_start", float, 1.0)),
        d_end=float(pick(args.d_end, "d_end", float, 0.0)),
        mapping=pick(args.mapping, "mapping", str, "soft"),
    )
    extras = {
        "out": args.out if args.out is not None else settings.get("out"),
        "workers": args.workers if args.workers is not None else settings.get("workers"),
        "timing": args.timing,
    }
    if extras["workers"] is not None:
        extras["workers"] = int(extras["workers"])
    return spec, extras


def _print_records(records) -> None:
    for rec in records:
        print(
            f"n={rec.n} alpha={rec.alpha} snr_db={rec.snr_db} "
            f"detector={rec.detector} iterations={rec.iterations} "
            f"ber={rec.ber!r} bits={rec.bits_sent} errors={rec.bit_errors} "
            f"status={rec.status}"
        )


def _cmd_sweep(args: argparse.Namespace) -> int:
    spec, extras = _merge_sweep_settings(args)
    records = run_sweep(spec, out_path=extras["out"],
                        workers=extras["workers"], timing=extras["timing"])
    _print_records(records)
    if extras["out"]:
        print(f"wrote {extras['out']}")
    return 0


def _cmd_figure(args: argparse.Namespace) -> int:
    spec = figure_spec(args.which, iterations=args.iterations,
                       min_bits=args.min_bits, base_seed=args.seed)
    out = args.out or f"fig{args.which}.csv"
    records = run_sweep(spec, out_path=out, workers=args.workers, timing=args.timing)
    _print_records(records)
    print(f"wrote {out}")
    return 0


def _cmd_matrices(args: argparse.Namespace) -> int:
    config = default_config(args.n, args.alpha)
    mats = carrier_matrix(config)
    with np.printoptions(precision=4, suppress=True, linewidth=120):
        print(f"n_carriers={args.n} alpha={args.alpha}")
        print("f_matrix =")
        print(mats.f_matrix)
        print("gram =")
        print(mats.gram)
    print(f"condition_estimate = {mats.condition_estimate!r}")
    if args.out:
        np.savez(args.out, f_matrix=mats.f_matrix, gram=mats.gram,
                 condition_estimate=mats.condition_estimate)
        print(f"wrote {args.out}")
    return 0


def _cmd_ops(args: argparse.Namespace) -> int:
    kwargs = {}
    if args.method == "iterative":
        kwargs["iterations"] = args.iterations
    if args.method == "sd":
        if args.gamma is None:
            print("error: --gamma is required for the sd method", file=sys.stderr)
            return 2
        kwargs["gamma"] = args.gamma
    ops = predicted_ops(args.method, args.n, args.alpha, args.l_points, **kwargs)

    def fmt(x: float) -> str:
        return str(int(x)) if float(x).is_integer() else repr(x)

    print(f"RA={fmt(ops.real_additions)} RM={fmt(ops.real_multiplications)}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "sweep": _cmd_sweep,
        "figure": _cmd_figure,
        "matrices": _cmd_matrices,
        "ops": _cmd_ops,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
