"""`longitudinal`: per-cell tests on repeated measurements, pooled into one combined p-value."""

import argparse
from pathlib import Path

from tcct.cli import method_list
from tcct.models.reports import PipelineMode
from tcct.services.ingest import LONGITUDINAL_COLUMNS, ingest_service


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "longitudinal",
        help="test every feature at every timepoint and combine the p-values",
        description=(
            f"Input columns: {', '.join(LONGITUDINAL_COLUMNS)}. One-part mode runs an OLS slope test per "
            "(feature, timepoint); two-part mode adds a logistic test on the zero/nonzero pattern."
        ),
    )
    parser.add_argument("--input", type=Path, required=True)
    parser.add_argument("--mode", type=PipelineMode, choices=list(PipelineMode), default=PipelineMode.TWO_PART)
    parser.add_argument("--methods", type=method_list, default=method_list("tcct,cct"))
    parser.add_argument("--block-col", default=None, help="combine separately within each value of this column")
    parser.add_argument("--output", type=Path, required=True)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    ingest_service.run_longitudinal(
        input_path=args.input,
        mode=args.mode,
        methods=args.methods,
        output_path=args.output,
        block_col=args.block_col,
    )
    return 0
