"""Command-line entry point for the p-value combination toolkit."""

import argparse
import sys
from typing import Optional, Sequence

from loguru import logger

from tcct.cli import combine, longitudinal, simulate
from tcct.core.config import settings
from tcct.core.errors import DomainError, TcctError

DOMAIN_ERROR_EXIT = 3


def configure_logging(level: str) -> None:
    """Send logs to stderr only; stdout and output files stay clean."""
    logger.remove()
    logger.add(sys.stderr, level=level)


def create_parser() -> argparse.ArgumentParser:
    """Build the parser and register the combine, longitudinal and simulate commands.

    Returns:
        argparse.ArgumentParser: Parser whose subcommands set a `handler` default.
    """
    parser = argparse.ArgumentParser(
        prog=settings.PROJECT_NAME,
        description="Truncated Cauchy combination of p-values, with the simulations that calibrate it.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    # Register commands
    combine.register(subparsers)
    longitudinal.register(subparsers)
    simulate.register(subparsers)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command and return its exit code.

    0 on success, 2 for usage and configuration errors, 3 for data errors.
    """
    configure_logging(settings.LOG_LEVEL)
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on bad arguments and 0 after --help/--version
        return int(e.code or 0)

    try:
        return args.handler(args)
    except TcctError as e:
        logger.error(e.detail)
        return e.exit_code
    except DomainError as e:
        logger.exception(f"{args.command} failed: {type(e).__name__}: {e}")
        return DOMAIN_ERROR_EXIT


if __name__ == "__main__":
    sys.exit(main())
