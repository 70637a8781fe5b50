#!/usr/bin/env python3
"""Main entry point for the f-convolution toolkit."""

import argparse
import os
import sys
from typing import List, Optional

sys.path.append(os.path.dirname(__file__))  # Add the src directory to the path

from classes.base import InputFormatError  # noqa: E402
from command_processor import EXIT_USAGE, CommandProcessor  # noqa: E402
from data.data_loader import CONFIG_PATH, configure_logging, load_config  # noqa: E402

FILE_HELP = "a JSON file, or the name of a bundled fixture in data/"

SWAP_CHOICES = ["auto", "on", "off"]
PAIRING_CHOICES = ["consecutive", "greedy"]


def _add_partition_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--swap", choices=SWAP_CHOICES, help="Build on f, on its transpose, or keep the cheaper (auto)")
    parser.add_argument("--pairing", choices=PAIRING_CHOICES, help="How rows of L are paired")


def _add_run_flags(parser: argparse.ArgumentParser, trials: int, sizes: List[int], arities: List[int]):
    parser.add_argument("--seed", type=int, help="Seed for the single random generator of the run")
    parser.add_argument("--trials", type=int, default=trials, help="Instances per setting")
    parser.add_argument("--D", type=int, nargs="+", default=sizes, help="Domain sizes to draw from")
    parser.add_argument("--n", type=int, nargs="+", default=arities, help="Arities to draw from")
    parser.add_argument("--M", type=int, default=10, help="Values are drawn from [-M, M]")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fconv", description="Generalized f-convolution via cyclic partitions")
    parser.add_argument("--config", default=CONFIG_PATH, help="Path to the configuration file (default: the project config.json)")
    parser.add_argument("--jobs", type=int, help="Worker threads for per-type convolutions (falls back to FCONV_JOBS)")
    parser.add_argument("--log-file", help="Override the log file from the configuration")
    commands = parser.add_subparsers(dest="command", required=True)

    partition = commands.add_parser("partition", help="Build or check a cyclic partition of f")
    partition.add_argument("function", help=f"Function table: {FILE_HELP}")
    partition.add_argument("--check", help="Validate this partition JSON instead of building one")
    partition.add_argument("--out", help="Write the partition JSON here instead of stdout")
    partition.add_argument("--dot", help="Write the representation graph of two rows as DOT")
    partition.add_argument("--rows", help="The two L labels for --dot, comma-separated (default: first two)")
    _add_partition_flags(partition)

    convolve = commands.add_parser("convolve", help="Compute g *_f h over all of T^n")
    convolve.add_argument("function", help=f"Function table: {FILE_HELP}")
    convolve.add_argument("g", help=f"Tensor over L^n: {FILE_HELP}")
    convolve.add_argument("h", help=f"Tensor over R^n: {FILE_HELP}")
    convolve.add_argument("--out", help="Write the result tensor here instead of stdout")
    convolve.add_argument("--method", choices=["partition", "naive"], default="partition")
    convolve.add_argument("--partition", help="Use this partition JSON instead of building one")
    convolve.add_argument("--explain", action="store_true", help="Report the chosen primes and roots")
    _add_partition_flags(convolve)

    query = commands.add_parser("query", help="Compute one entry (g *_f h)(v)")
    query.add_argument("function", help=f"Function table: {FILE_HELP}")
    query.add_argument("g", help=f"Tensor over L^n: {FILE_HELP}")
    query.add_argument("h", help=f"Tensor over R^n: {FILE_HELP}")
    query.add_argument("--vector", required=True, help="Comma-separated T labels, e.g. a,b,c")
    query.add_argument("--pad-left", help="L element fixed in the padding coordinate for odd n")
    query.add_argument("--pad-right", help="R element fixed in the padding coordinate for odd n")

    verify = commands.add_parser("verify", help="Compare engine and query against the oracle")
    verify.add_argument("function", nargs="?", help="Function table file or fixture name (default: random functions)")
    mode = verify.add_mutually_exclusive_group()
    mode.add_argument("--random", action="store_true", help="Draw random functions (default)")
    mode.add_argument("--exhaustive", action="store_true", help="Enumerate every function on each |D|")
    _add_run_flags(verify, trials=20, sizes=[2, 3], arities=[1, 2, 3])
    _add_partition_flags(verify)

    bench = commands.add_parser("bench", help="Time the engine against the naive double loop")
    bench.add_argument("function", nargs="?", help="Function table file or fixture name (default: --named)")
    bench.add_argument("--named", choices=["random", "add", "xor", "and"], default="xor")
    bench.add_argument("--method", choices=["partition", "naive", "both"], default="both")
    _add_run_flags(bench, trials=1, sizes=[2], arities=[12])
    _add_partition_flags(bench)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except InputFormatError as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.log_file:
        config["log_file"] = args.log_file
    configure_logging(config)
    return CommandProcessor(config).process_command(args)


if __name__ == "__main__":
    sys.exit(main())
