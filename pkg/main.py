from pathlib import Path
import argparse
import logging
import sys

from src.core import core, logs
from src.modules.Relations import RankStrategy
from src.modules.Reconstruction import Settings

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Reconstruct point configurations from unlabeled path and loop length measurements.")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log search internals")
    parser.add_argument("--quiet", action="store_true", help="Log warnings and errors only")
    parser.add_argument("--log-file", type=Path, help="Also write the log to this file")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="Simulate a measurement data set")
    gen.add_argument("-j", "--json", type=Path, help="JSON experiment file; flags override its values")
    gen.add_argument("--points", type=int, help="Number of points n")
    gen.add_argument("--dim", type=int, help="Dimension d")
    gen.add_argument("--mode", choices=["path", "loop"])
    gen.add_argument("--extra", type=int, help="Number of distractor paths or loops")
    gen.add_argument("--max-hops", type=int, help="Longest distractor in edges")
    gen.add_argument("--bound", type=int, help="Largest edge multiplicity of a distractor")
    gen.add_argument("--scale", type=int, help="Traverse every measurement this many times")
    gen.add_argument("--drop", type=float, help="Fraction of values deleted after measuring")
    gen.add_argument("--seed-config", type=int)
    gen.add_argument("--seed-ensemble", type=int)
    gen.add_argument("--seed-shuffle", type=int)
    gen.add_argument("--out", type=Path, default=Path("dataset.json"), help="Data set file")
    gen.add_argument("--truth-out", type=Path, default=Path("truth.json"), help="True configuration file")
    gen.add_argument("--ensemble-out", type=Path, default=Path("ensemble.json"), help="True ensemble file")
    gen.add_argument("--labeling-out", type=Path, help="True labeling of the shuffled values")

    rec = commands.add_parser("reconstruct", help="Reconstruct a configuration from a data set")
    rec.add_argument("dataset", type=Path)
    rec.add_argument("--out", type=Path, default=Path("recovered.json"), help="Recovered configuration file")
    rec.add_argument("--labeling-out", type=Path, default=Path("labeling.json"),
                     help="Per-value explanation file")
    rec.add_argument("--tol", type=float, default=1e-9, help="Cayley-Menger zero tolerance")
    rec.add_argument("--rank-strategy", choices=[s.value for s in RankStrategy])
    rec.add_argument("--restricted", action="store_true",
                     help="Assert the ensemble holds pings and triangles only")
    rec.add_argument("--bound", type=int, help="Override the data set's multiplicity bound")
    rec.add_argument("--max-value", type=float, help="Ignore values above this cap")
    rec.add_argument("--workers", type=int, default=1)
    rec.add_argument("--plot", type=Path, help="SVG scatter of a d=2 reconstruction")

    ver = commands.add_parser("verify", help="Compare a reconstruction with the true configuration")
    ver.add_argument("truth", type=Path)
    ver.add_argument("recovered", type=Path)
    ver.add_argument("--tol", type=float, default=1e-7, help="Relative length tolerance")
    ver.add_argument("--max-scale", type=int, default=8)
    return parser


def experiment_from_args(args: argparse.Namespace) -> core.ExperimentSpec:
    data = core.load_json(args.json) if args.json else {}
    seeds = dict(data.get("seeds", {}))
    for key, flag in (("config", args.seed_config), ("ensemble", args.seed_ensemble), ("shuffle", args.seed_shuffle)):
        if flag is not None:
            seeds[key] = flag
    data["seeds"] = seeds
    for key, flag in (("points", args.points), ("dim", args.dim), ("mode", args.mode), ("extra", args.extra),
                      ("max_hops", args.max_hops), ("bound", args.bound), ("scale", args.scale),
                      ("drop", args.drop)):
        if flag is not None:
            data[key] = flag
    return core.helper_clean_experiment(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logs.setup(level, args.log_file)

    if args.command == "gen":
        try:
            spec = experiment_from_args(args)
        except core.InvalidSpec as error:
            logger.error(f"Invalid experiment: {error}")
            return core.EXIT_INVALID_SPEC
        except (OSError, ValueError) as error:
            logger.error(f"Malformed experiment file {args.json}: {error}")
            return core.EXIT_MALFORMED
        return core.cmd_gen(spec, args.out, args.truth_out, args.ensemble_out, args.labeling_out)

    if args.command == "reconstruct":
        try:
            settings = Settings(
                Tol=args.tol,
                Strategy=RankStrategy(args.rank_strategy) if args.rank_strategy else None,
                RestrictedEnsemble=args.restricted,
                MaxValue=args.max_value,
                Workers=args.workers,
            )
        except ValueError as error:
            logger.error(f"Invalid options: {error}")
            return core.EXIT_INVALID_SPEC
        return core.cmd_reconstruct(args.dataset, args.out, args.labeling_out, settings, args.plot, args.bound)

    return core.cmd_verify(args.truth, args.recovered, args.tol, args.max_scale)


if __name__ == "__main__":
    sys.exit(main())
