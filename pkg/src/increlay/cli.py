"""Command-line front end writing CSV tables.

Subcommands::

    increlay phases   --p 0.8 --p-bar-sd 0.25 --relays 1
    increlay sweep    --p-grid 0:1:11 --pbar-grid 0:1:5 --relays 1
    increlay capacity --strategy df,baf --epsilon 0.01 --p 1,0.5 --snr-db -10
    increlay simulate --relays 2 --rate 0.1 --p 0.9 --blocks 100000 --seed 7

Every subcommand accepts ``--seed``, ``--out`` and ``--config``. A config
file holds flat ``key = value`` lines using the long option names; flags on
the command line win.

Exit codes: 0 success, 2 usage error, 3 solver failure, 4 internal
consistency failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from contextlib import contextmanager

import numpy as np

from .capacity import baf_capacity, df_capacity
from .channel import ChannelParams, db_to_linear
from .errors import ConsistencyError, DomainError, SolverError
from .phases import (
    ROUTE_TOL,
    DecodeProfile,
    build_phase_tree,
    expected_phases,
    expected_phases_matrix,
    expected_phases_one_relay,
    expected_phases_tree,
)
from .simulation import SimConfig, analytic_phases, run

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SOLVER = 3
EXIT_CONSISTENCY = 4


class UsageError(Exception):
    pass


def fmt(value) -> str:
    """Locale-independent CSV cell with 12 significant digits."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    x = float(value)
    if math.isnan(x):
        return "nan"
    return format(x, ".12g")


def write_csv(stream, header, rows):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])


def float_list(text: str) -> list[float]:
    """Parse ``a,b,c`` or the evenly spaced grid ``start:stop:count``."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            n = int(count)
            if n < 1:
                raise ValueError
            return np.linspace(float(start), float(stop), n).tolist()
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number list {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty number list")
    return values


def str_list(text: str) -> list[str]:
    return [v.strip().upper() for v in text.split(",") if v.strip()]


def _common(parser):
    parser.add_argument("--seed", type=int, default=0, help="random seed (non-negative integer)")
    parser.add_argument("--out", default="-", help="output path, '-' for stdout")
    parser.add_argument("--config", default=None, help="flat key=value config file")


def _channel_args(parser, with_relays=True):
    if with_relays:
        parser.add_argument("--relays", type=int, default=1)
    parser.add_argument("--var-sd", type=float, default=1.0)
    parser.add_argument("--var-sr", type=float_list, default="1", help="one value or one per relay")
    parser.add_argument("--var-rd", type=float_list, default="1", help="one value or one per relay")
    snr = parser.add_mutually_exclusive_group()
    snr.add_argument("--snr", type=float, default=None, help="linear SNR")
    snr.add_argument("--snr-db", type=float, default=None, help="SNR in dB")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="increlay",
        description="Incremental relaying with imperfect one-bit feedback.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = sub.add_parser("phases", help="E(N) for one parameter set by every route")
    _common(p)
    p.add_argument("--p", type=float, default=1.0, help="feedback reliability")
    p.add_argument("--p-bar-sd", type=float, default=None, help="source-destination failure probability")
    p.add_argument("--profile", type=float_list, default=None, help="decode profile q0,q1,...")
    p.add_argument("--relays", type=int, default=1)
    subs["phases"] = p

    p = sub.add_parser("sweep", help="E(N) over a grid of p and P̄_SD")
    _common(p)
    p.add_argument("--p-grid", type=float_list, default="0:1:11")
    p.add_argument("--pbar-grid", type=float_list, default="0:1:11")
    p.add_argument("--relays", type=int, default=1)
    p.add_argument("--levels", type=float_list, default=None,
                   help="relay-level probabilities q1..q(K-1); default repeats P_SD")
    subs["sweep"] = p

    p = sub.add_parser("capacity", help="epsilon-outage capacity for one relay")
    _common(p)
    _channel_args(p, with_relays=False)
    p.add_argument("--strategy", type=str_list, default="DF", help="DF, BAF or both")
    p.add_argument("--epsilon", type=float_list, default="0.01")
    p.add_argument("--p", type=float_list, default="1")
    subs["capacity"] = p

    p = sub.add_parser("simulate", help="Monte Carlo protocol simulation")
    _common(p)
    _channel_args(p)
    p.add_argument("--rate", type=float, default=0.5)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--strategy", default="DF", type=str.upper, choices=["DF", "AF"])
    p.add_argument("--blocks", type=int, default=100_000)
    p.add_argument("--feedback", default="shared", choices=["shared", "independent"])
    p.add_argument("--partitions", type=int, default=1)
    subs["simulate"] = p
    return parser, subs


def read_config(path) -> dict[str, str]:
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    for number, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{number}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.lstrip("-").replace("-", "_")] = value
    return values


def parse_args(argv):
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        sp = subs[args.command]
        known = {a.dest for a in sp._actions}
        cfg = read_config(args.config)
        unknown = sorted(set(cfg) - known - {"config"})
        if unknown:
            sp.error(f"unknown config key(s): {', '.join(unknown)}")
        sp.set_defaults(**cfg)
        args = parser.parse_args(argv)
    return args


def _snr(args) -> float:
    if args.snr_db is not None:
        return db_to_linear(args.snr_db)
    return 1.0 if args.snr is None else args.snr


def _channel(args, relays) -> ChannelParams:
    def per_relay(values, name):
        if len(values) == 1:
            return tuple(values) * relays
        if len(values) != relays:
            raise DomainError(f"{name} needs 1 or {relays} values, got {len(values)}")
        return tuple(values)

    if relays < 0:
        raise DomainError("relays must be >= 0")
    return ChannelParams(
        args.var_sd, per_relay(args.var_sr, "--var-sr"), per_relay(args.var_rd, "--var-rd"), _snr(args)
    )


def cmd_phases(args):
    k = args.relays
    if args.profile is not None:
        profile = DecodeProfile(tuple(args.profile))
    elif args.p_bar_sd is not None:
        profile = DecodeProfile.from_source_outage(args.p_bar_sd, [1.0 - args.p_bar_sd] * max(k - 1, 0))
    else:
        raise DomainError("give --p-bar-sd or --profile")
    value = expected_phases(profile, args.p, k)
    tree = matrix = closed = None
    if k >= 1:
        tree = expected_phases_tree(build_phase_tree(profile, args.p, k))
        matrix = expected_phases_matrix(profile, args.p, k)
        if k == 1:
            closed = expected_phases_one_relay(profile.p_bar_sd, args.p)
        for other in (tree, matrix, closed):
            if other is not None and abs(other - value) > ROUTE_TOL:
                raise ConsistencyError(f"routes disagree: {value!r} vs {other!r}")
    header = ["p", "p_bar_sd", "K", "expected_phases", "tree_route", "matrix_route", "closed_form"]
    return header, [[args.p, profile.p_bar_sd, k, value, tree, matrix, closed]]


def cmd_sweep_phases(p_grid, pbar_grid, num_relays, levels=None):
    """Rows ``(p, p_bar_sd, K, expected_phases)`` over the product of both grids."""
    if not p_grid or not pbar_grid:
        raise DomainError("grids must be non-empty")
    k = num_relays
    if levels is not None and len(levels) < k - 1:
        raise DomainError(f"--levels needs {k - 1} value(s) for {k} relays")
    rows = []
    for p in p_grid:
        for q in pbar_grid:
            tail = list(levels[: k - 1]) if levels is not None else [1.0 - q] * max(k - 1, 0)
            profile = DecodeProfile.from_source_outage(q, tail)
            rows.append([p, q, k, expected_phases(profile, p, k)])
    return ["p", "p_bar_sd", "K", "expected_phases"], rows


def cmd_capacity(args):
    params = _channel(args, 1)
    solvers = {"DF": df_capacity, "BAF": baf_capacity}
    for s in args.strategy:
        if s not in solvers:
            raise DomainError(f"strategy must be DF or BAF, got {s!r}")
    rows = []
    for s in args.strategy:
        for eps in args.epsilon:
            for p in args.p:
                result = solvers[s](params, eps, p)
                rows.append([s, eps, p, params.snr, result.rate, result.expected_phases, result.residual])
    return ["strategy", "epsilon", "p", "snr", "rate", "expected_phases", "residual"], rows


SIM_HEADER = [
    "record", "strategy", "K", "p", "snr", "rate", "blocks", "seed", "partitions", "feedback",
    "mean_phases", "phases_stderr", "outage_rate", "outage_stderr", "collisions",
    "analytic_phases", "z_score", "phases", "count",
]


def cmd_simulate(args):
    params = _channel(args, args.relays)
    config = SimConfig(
        params, args.rate, args.p, args.strategy, args.blocks, args.seed, args.feedback, args.partitions
    )
    report = run(config)
    analytic = analytic_phases(config)
    z = None
    if analytic is not None:
        diff = report.mean_phases - analytic
        z = 0.0 if report.phases_stderr == 0 and diff == 0 else (
            diff / report.phases_stderr if report.phases_stderr > 0 else math.copysign(math.inf, diff)
        )
    summary = [
        "summary", config.strategy, config.num_relays, config.p, params.snr, config.rate, config.blocks,
        config.seed, config.partitions, config.feedback_observation, report.mean_phases,
        report.phases_stderr, report.outage_rate, report.outage_stderr, report.collisions,
        analytic, z, None, None,
    ]
    rows = [summary]
    for phases, count in enumerate(report.phase_histogram, start=1):
        rows.append(["histogram"] + [None] * 16 + [phases, count])
    return SIM_HEADER, rows


@contextmanager
def _output(path):
    if path in (None, "-", "stdout"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except UsageError as exc:
        print(f"increlay: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK

    try:
        if args.seed < 0:
            raise DomainError("--seed must be a non-negative integer")
        if args.command == "phases":
            header, rows = cmd_phases(args)
        elif args.command == "sweep":
            header, rows = cmd_sweep_phases(args.p_grid, args.pbar_grid, args.relays, args.levels)
        elif args.command == "capacity":
            header, rows = cmd_capacity(args)
        else:
            header, rows = cmd_simulate(args)
        buf = io.StringIO()
        write_csv(buf, header, rows)
    except DomainError as exc:
        print(f"increlay: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"increlay: solver error: {exc} (last iterate {exc.last_iterate})", file=sys.stderr)
        return EXIT_SOLVER
    except ConsistencyError as exc:
        print(f"increlay: internal consistency error: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY

    with _output(args.out) as stream:
        stream.write(buf.getvalue())
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
