"""
Command-line entry point. Exit codes: 0 success, 2 usage, 3 data, 4 numeric.
"""
import argparse
import logging
import sys
from typing import List, Optional

from .. import __version__
from ..core.database import init_registry
from ..core.errors import EXIT_DATA, EXIT_OK, DlcmError
from . import analyze, evaluate, initial, runs, sweep, synth, train

logger = logging.getLogger(__name__)

COMMANDS = (synth, initial, train, evaluate, analyze, sweep, runs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dlcm",
        description="Listwise context re-ranking: initial ranking, training, evaluation and analysis.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    init_registry()
    try:
        args.handler(args)
    except DlcmError as e:
        logger.debug("command failed", exc_info=True)
        print(f"❌ {e.detail}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"❌ I/O error: {e.filename or ''}: {e.strerror or e}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK
