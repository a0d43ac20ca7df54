"""
Command-line entry point.

    python -m sdc_engine decide FILE [--json] [--emit-transform OUT]
    python -m sdc_engine transform FILE --output OUT
    python -m sdc_engine synth --kind sdc --n 4 --m 3 --r 4 --seed 7 --output OUT
    python -m sdc_engine evolution FILE [--emit-transform OUT]

Exit codes: 0 SDC (or success), 1 NotSDC, 2 input or usage error.
"""
import argparse
import logging
import sys

from pydantic import ValidationError

from sdc_engine.evolution import decide_evolution
from sdc_engine.matrix_io import load_family, read_structure_tensor, write_transform
from sdc_engine.sdc import decide_sdc
from sdc_engine.shared.config import ToleranceConfig
from sdc_engine.shared.errors import SdcError
from sdc_engine.shared.log_config import configure_logging
from sdc_engine.synth import KINDS, generate, write_instance
from sdc_engine.tools.report import certificate_status, error_status, evolution_status, render, synth_status

logger = logging.getLogger(__name__)

EXIT_SDC = 0
EXIT_NOT_SDC = 1
EXIT_ERROR = 2


def _add_tolerance_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tol-rank", type=float, help="relative rank tolerance (rank_rel_tol)")
    parser.add_argument("--tol-residual", type=float, help="residual tolerance (residual_tol)")
    parser.add_argument("--seed", type=int, help="seed for witness sampling")
    parser.add_argument("--samples", type=int, help="number of random witness candidates")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdc_engine",
        description="Decide simultaneous diagonalizability via congruence of complex symmetric matrices.",
    )
    parser.add_argument("--log-level", help="logging level (default: SDC_LOG_LEVEL or WARNING)")
    sub = parser.add_subparsers(dest="command", required=True)

    decide = sub.add_parser("decide", help="decide SDC for a matrix-set file")
    decide.add_argument("input")
    decide.add_argument("--emit-transform", metavar="OUT", help="on SDC, write P and D_j to OUT")
    decide.add_argument("--json", action="store_true", help="machine-readable report")
    _add_tolerance_flags(decide)

    transform = sub.add_parser("transform", help="decide and write the congruence transform")
    transform.add_argument("input")
    transform.add_argument("--output", required=True, metavar="OUT")
    transform.add_argument("--json", action="store_true")
    _add_tolerance_flags(transform)

    synth = sub.add_parser("synth", help="write a seeded synthetic family")
    synth.add_argument("--kind", choices=KINDS, default="sdc")
    synth.add_argument("--n", type=int, required=True)
    synth.add_argument("--m", type=int, required=True)
    synth.add_argument("--r", type=int, help="maximum pencil rank (default n)")
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--output", required=True, metavar="OUT")
    synth.add_argument("--json", action="store_true")

    evolution = sub.add_parser("evolution", help="test a structure tensor for a natural basis")
    evolution.add_argument("input")
    evolution.add_argument("--emit-transform", metavar="OUT", help="on success, write the natural-basis change P")
    evolution.add_argument("--json", action="store_true")
    _add_tolerance_flags(evolution)
    return parser


def config_from_args(args: argparse.Namespace) -> ToleranceConfig:
    return ToleranceConfig.from_env(
        rank_rel_tol=args.tol_rank,
        residual_tol=args.tol_residual,
        rng_seed=args.seed,
        max_rank_samples=args.samples,
    )


def run_decide(args: argparse.Namespace) -> int:
    cfg = config_from_args(args)
    pencil, _ = load_family(args.input, cfg)
    cert = decide_sdc(pencil, cfg)
    out = args.output if args.command == "transform" else args.emit_transform
    if out and cert.is_sdc:
        write_transform(out, cert.P, cert.diagonals, source=args.input)
        logger.info("transform written to %s", out)
    print(render(certificate_status(cert), args.json))
    return EXIT_SDC if cert.is_sdc else EXIT_NOT_SDC


def run_synth(args: argparse.Namespace) -> int:
    instance = generate(args.kind, args.n, args.m, args.r, args.seed)
    family_path, truth_path = write_instance(args.output, instance)
    print(render(synth_status(instance, family_path, truth_path), args.json))
    return EXIT_SDC


def run_evolution(args: argparse.Namespace) -> int:
    cfg = config_from_args(args)
    tensor = read_structure_tensor(args.input).to_array()
    result = decide_evolution(tensor, cfg)
    cert = result.certificate
    if args.emit_transform and cert.is_sdc:
        write_transform(args.emit_transform, cert.P, cert.diagonals, source=args.input)
    print(render(evolution_status(result), args.json))
    return EXIT_SDC if cert.is_sdc else EXIT_NOT_SDC


COMMANDS = {
    "decide": run_decide,
    "transform": run_decide,
    "synth": run_synth,
    "evolution": run_evolution,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else 0
    configure_logging(args.log_level)

    try:
        return COMMANDS[args.command](args)
    except ValidationError as e:
        first = e.errors()[0]
        return _fail(args, f"invalid configuration: {'.'.join(map(str, first['loc']))} {first['msg']}")
    except SdcError as e:
        return _fail(args, str(e))


def _fail(args: argparse.Namespace, message: str) -> int:
    if getattr(args, "json", False):
        print(render(error_status(message), True))
    print(f"error: {message}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
