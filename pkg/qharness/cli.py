"""Command-line entry point for qharness.

Data goes to standard output (CSV or JSON), diagnostics to standard error.
"""

import argparse
import csv
import json
import sys
from typing import Any, Dict, List, Optional, Sequence, TextIO

from loguru import logger
from pydantic import ValidationError

from . import __version__
from .commands import EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE
from .commands.kernel import kernel_table
from .commands.marginal import marginal_table
from .commands.sample import sample_table
from .commands.verify import SUITE_CHOICES, run_verification
from .config import Settings, load_settings, thread_count
from .logging_setup import configure_logging


def _parse_grid(value: str) -> List[float]:
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be comma-separated numbers, got '{value}'")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="YAML config file")
    parser.add_argument("--format", choices=["csv", "json"], help="Output format")
    parser.add_argument("--log-level", help="Log level",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR", "debug", "info", "warning", "error"])
    parser.add_argument("--log-json", action="store_true", help="Structured JSON log records on stderr")


def _add_params(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--theta", type=float, default=0.0, help="Drift-type parameter theta")
    parser.add_argument("--tau", type=float, default=0.0, help="Parameter tau >= 0")
    parser.add_argument("--q", type=float, default=0.0, help="Deformation parameter q in [-1, 1]")
    parser.add_argument("--nodes", type=int, help="Quadrature nodes N")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qharness",
                                     description="q-Meixner Markov processes: kernels, sampling and verification")
    parser.add_argument("--version", action="version", version=f"qharness {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    marginal = sub.add_parser("marginal", help="Law of X_t started from 0")
    _add_common(marginal)
    _add_params(marginal)
    marginal.add_argument("--t", type=float, required=True, help="Time t > 0")
    marginal.add_argument("--k-terms", type=int, help="Product truncation of the closed-form density")

    kernel = sub.add_parser("kernel", help="Transition kernel from x at time s to time t")
    _add_common(kernel)
    _add_params(kernel)
    kernel.add_argument("--x", type=float, required=True, help="Value at time s")
    kernel.add_argument("--s", type=float, required=True, help="Start time s >= 0")
    kernel.add_argument("--t", type=float, required=True, help="End time t > s")
    kernel.add_argument("--free-density", action="store_true", help="Closed-form q = 0 density and atom rows")

    sample = sub.add_parser("sample", help="Sample trajectories on a time grid")
    _add_common(sample)
    _add_params(sample)
    sample.add_argument("--grid", type=_parse_grid, required=True, help="Times t1,t2,...")
    sample.add_argument("--paths", type=int, default=1, help="Number of paths")
    sample.add_argument("--seed", type=int, default=0, help="Master seed")
    sample.add_argument("--threads", type=int, help="Worker cap (overrides QHARNESS_THREADS)")

    verify = sub.add_parser("verify", help="Run the verification battery")
    _add_common(verify)
    verify.add_argument("--suite", choices=SUITE_CHOICES, default="all", help="Suite to run")
    verify.add_argument("--sweep", type=int, help="Random draws per suite")
    verify.add_argument("--seed", type=int, help="Master seed")
    verify.add_argument("--nodes", type=int, help="Nodes per kernel in nested quadrature")
    return parser


def _format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(result: Dict[str, Any], out: TextIO) -> None:
    """Metadata as `#` lines, then the header and one line per row."""
    metadata = dict(result["metadata"])
    out.write(f"# qharness {metadata.pop('version')} {result['command']}\n")
    for key, value in metadata.items():
        out.write(f"# {key}: {json.dumps(value)}\n")
    for key, value in result.get("moments", {}).items():
        out.write(f"# moment_{key}: {value!r}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(result["columns"])
    for row in result["rows"]:
        writer.writerow([_format_cell(v) for v in row])


def write_json(result: Dict[str, Any], out: TextIO) -> None:
    payload = {k: v for k, v in result.items() if k != "status"}
    out.write(json.dumps(payload, indent=2))
    out.write("\n")


def _run_table(args: argparse.Namespace, settings: Settings) -> Dict[str, Any]:
    nodes = args.nodes or settings.quadrature.nodes
    if args.command == "marginal":
        return marginal_table(args.theta, args.tau, args.q, args.t, nodes,
                              args.k_terms or settings.quadrature.k_terms, settings.quadrature.max_nodes)
    if args.command == "kernel":
        return kernel_table(args.theta, args.tau, args.q, args.x, args.s, args.t, nodes, args.free_density)
    threads = args.threads or thread_count(settings)
    return sample_table(args.theta, args.tau, args.q, args.grid, args.paths, args.seed, nodes, threads)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run one subcommand and return its exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logger.enable("qharness")

    try:
        settings = load_settings(args.config)
    except ValidationError as e:
        logger.error(f"Invalid configuration: {str(e)}")
        return EXIT_USAGE

    configure_logging(args.log_level or settings.logging.level,
                      args.log_json or settings.logging.json_records)
    out_format = args.format or settings.output.format

    if args.command == "verify":
        result = run_verification(
            suite=args.suite,
            sweep=args.sweep or settings.verification.sweep,
            seed=args.seed if args.seed is not None else settings.verification.seed,
            nodes=args.nodes or settings.verification.nodes,
            marginal_nodes=settings.quadrature.nodes,
            resolvent_nodes=settings.quadrature.max_nodes,
        )
        if result["status"] == "error":
            return result["exit_code"]
        sys.stdout.write(json.dumps(result["report"], indent=2))
        sys.stdout.write("\n")
        return EXIT_OK if result["passed"] else EXIT_CHECK_FAILED

    result = _run_table(args, settings)
    if result["status"] == "error":
        return result["exit_code"]
    if out_format == "json":
        write_json(result, sys.stdout)
    else:
        write_csv(result, sys.stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
