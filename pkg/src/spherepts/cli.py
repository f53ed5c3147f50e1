"""Command line entry point.

Exit codes: 0 success, 2 budget refusal, 3 invalid arguments, 4 an empty
point set where a nonempty one was required.  Data goes to files or standard
output; progress notes go to standard error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import baselines, config, experiments
from .errors import BudgetError, EmptySetError

log = logging.getLogger("spherepts")


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage by default; 2 is taken by budget refusals
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(3, f"{self.prog}: error: {message}\n")


def _parse_shift(text: str) -> tuple[int, int, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("shift must be three comma-separated integers")
    try:
        h = tuple(int(v) for v in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if all(v == 0 for v in h):
        raise argparse.ArgumentTypeError("shift must be nonzero")
    return h


def _parse_mod8(text: str) -> tuple[int, ...]:
    try:
        classes = tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if any(not 0 <= c <= 7 for c in classes):
        raise argparse.ArgumentTypeError("mod-8 classes must lie in 0..7")
    return classes


def _parse_kv(text: str) -> tuple[str, float]:
    if "=" not in text:
        raise argparse.ArgumentTypeError("parameter must look like name=value")
    key, _, value = text.partition("=")
    try:
        return key.strip(), float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spherepts", description=__doc__)
    parser.add_argument("--config", help="path to a key=value config overriding the defaults")
    parser.add_argument("-v", "--verbose", action="store_true", help="progress notes on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="write the lattice points of one sphere as CSV")
    p.add_argument("--n", type=int, required=True, help="squared radius")
    p.add_argument("--dim", type=int, default=3, choices=(2, 3, 4))
    p.add_argument("--out", required=True, help="point-set CSV path")

    p = sub.add_parser("stats", help="statistics of one point set as a JSON report")
    p.add_argument("--n", type=int, help="squared radius of an arithmetic set")
    p.add_argument("--dim", type=int, default=3, choices=(2, 3, 4))
    p.add_argument("--in", dest="in_path", help="point-set CSV to load instead of --n")
    p.add_argument("--random", type=int, help="size of a uniform random set instead of --n")
    p.add_argument("--k", type=int, default=2, choices=(1, 2, 3), help="sphere dimension for --random")
    p.add_argument("--seed", type=int, help="seed for --random (default from config)")
    p.add_argument("--energy", action="store_true")
    p.add_argument("--r", type=float, action="append", dest="thresholds", metavar="R",
                   help="pair-count threshold, repeatable")
    p.add_argument("--spacing", action="store_true")
    p.add_argument("--min-spacing", action="store_true")
    p.add_argument("--covering", action="store_true")
    p.add_argument("--mesh", type=float, help="covering probe mesh (default from config)")
    p.add_argument("--discrepancy", action="store_true")
    p.add_argument("--caps", type=int, help="number of test caps (default from config)")
    p.add_argument("--all", action="store_true", help="all statistics the budgets allow")
    p.add_argument("--out", help="JSON report path (default standard output)")
    p.add_argument("--spacing-csv", help="also write the spacing histogram CSV here")
    p.add_argument("--ripley-csv", help="also write the pair-count CSV here")
    p.add_argument("--force", action="store_true", help="ignore pair/probe budgets")

    p = sub.add_parser("table1", help="energy deviation table: integer vs random")
    p.add_argument("--out", help="CSV path (text table always on standard output)")
    p.add_argument("--runs", type=int, help="random runs per row (default from config)")
    p.add_argument("--seed", type=int)

    p = sub.add_parser("ensemble", help="sweep n: pair counts at r = n^(delta-1/2)")
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--delta", type=float, help="exponent offset (default from config)")
    p.add_argument("--squarefree", action="store_true", help="keep only squarefree n")
    p.add_argument("--exclude-mod8", type=_parse_mod8, default=(),
                   help="comma-separated residues mod 8 to skip")
    p.add_argument("--shift", type=_parse_shift, action="append", default=[],
                   help="integer shift h for summed shifted counts, repeatable")
    p.add_argument("--out", help="per-n rows CSV path")

    p = sub.add_parser("scaling", help="log-log slope of one statistic against N")
    p.add_argument("--target", required=True, choices=experiments.SCALING_TARGETS)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="per-point CSV path")

    p = sub.add_parser("figdata", help="CSV bundles behind the figures")
    p.add_argument("--which", required=True, choices=("fig1", "fig2"))
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("baseline", help="Monte Carlo summary of one statistic")
    p.add_argument("--statistic", required=True, choices=sorted(baselines.STATISTICS))
    p.add_argument("--n-points", type=int, required=True)
    p.add_argument("--k", type=int, default=2, choices=(1, 2, 3))
    p.add_argument("--runs", type=int, help="default from config")
    p.add_argument("--seed", type=int)
    p.add_argument("--param", type=_parse_kv, action="append", default=[],
                   help="statistic parameter name=value, repeatable")
    p.add_argument("--out", help="JSON path (default standard output)")

    return parser


def _dispatch(args: argparse.Namespace, cfg: dict) -> None:
    if args.command == "enumerate":
        experiments.cmd_enumerate(args.n, args.dim, args.out, cfg)
    elif args.command == "stats":
        want_all = args.all
        experiments.cmd_stats(
            cfg,
            n=args.n,
            dim=args.dim,
            in_path=args.in_path,
            random_n=args.random,
            k=args.k,
            seed=args.seed,
            do_energy=args.energy or want_all,
            ripley_thresholds=args.thresholds,
            do_spacing=args.spacing or want_all,
            do_min_spacing=args.min_spacing or want_all,
            do_covering=args.covering or want_all,
            mesh=args.mesh,
            do_discrepancy=args.discrepancy or want_all,
            num_caps=args.caps,
            out=args.out,
            spacing_csv=args.spacing_csv,
            ripley_csv=args.ripley_csv,
            force=args.force,
        )
    elif args.command == "table1":
        experiments.cmd_table1(cfg, out=args.out, runs=args.runs, seed=args.seed)
    elif args.command == "ensemble":
        experiments.cmd_ensemble(
            cfg,
            n_min=args.n_min,
            n_max=args.n_max,
            delta=args.delta,
            squarefree_only=args.squarefree,
            exclude_mod8=args.exclude_mod8,
            shifts=tuple(args.shift),
            out=args.out,
        )
    elif args.command == "scaling":
        experiments.cmd_scaling(cfg, target=args.target, seed=args.seed, out=args.out)
    elif args.command == "figdata":
        experiments.cmd_fig_data(cfg, which=args.which, out_dir=args.out_dir, seed=args.seed)
    elif args.command == "baseline":
        experiments.cmd_baseline(
            cfg,
            statistic=args.statistic,
            n_points=args.n_points,
            k=args.k,
            runs=args.runs,
            seed=args.seed,
            params=dict(args.param) or None,
            out=args.out,
        )
    else:  # pragma: no cover - argparse enforces the choices
        raise ValueError(f"unknown command {args.command!r}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
    )
    try:
        cfg = config.load(args.config)
    except (OSError, ValueError) as exc:
        log.error("bad config: %s", exc)
        return 3
    try:
        _dispatch(args, cfg)
    except BudgetError as exc:
        log.error("budget refusal: %s", exc)
        return 2
    except EmptySetError as exc:
        log.error("empty set: %s", exc)
        return 4
    except (ValueError, OSError) as exc:
        log.error("invalid arguments: %s", exc)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
