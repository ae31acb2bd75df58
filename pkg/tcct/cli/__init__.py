"""Command-line subcommands and their shared argument types."""

import argparse
from typing import List

from tcct.models.pvalues import Method, parse_methods


def float_list(raw: str) -> List[float]:
    """argparse type for comma-separated numbers, e.g. --alpha 0.05,0.01."""
    try:
        values = [float(v) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {raw!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one number")
    return values


def method_list(raw: str) -> List[Method]:
    try:
        return parse_methods(raw)
    except ValueError:
        choices = ",".join(m.value for m in Method)
        raise argparse.ArgumentTypeError(f"unknown method in {raw!r}; choose from {choices}")
