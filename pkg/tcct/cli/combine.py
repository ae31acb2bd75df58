"""`combine`: per-group combination of a p-value column."""

import argparse
from pathlib import Path

from tcct.cli import method_list
from tcct.services.ingest import ingest_service


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "combine",
        help="combine p-values within each group of a CSV file",
        description="Combine the p-values of each group (e.g. SNPs by chromosome) into one p-value per method.",
    )
    parser.add_argument("--input", type=Path, required=True, help="CSV with a header row")
    parser.add_argument("--group-col", required=True)
    parser.add_argument("--p-col", required=True)
    parser.add_argument("--weight-col", default=None, help="nonnegative weights, normalized within each group")
    parser.add_argument("--methods", type=method_list, default=method_list("tcct,cct"))
    parser.add_argument("--output", type=Path, required=True)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    ingest_service.run_combine(
        input_path=args.input,
        group_col=args.group_col,
        p_col=args.p_col,
        methods=args.methods,
        output_path=args.output,
        weight_col=args.weight_col,
    )
    return 0
