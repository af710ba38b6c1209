#!/usr/bin/env python3
"""
Main entry point for vecfont.
Parses the command line, runs one subcommand and maps failures to exit codes.
"""

import sys
from typing import List, Optional

from src.core import VecFontApp
from src.logger import configure_logging, get_logger
from src.patterns.error_handling import ApplicationError
from src.utils import format_output

logger = get_logger("vecfont.main")


def main(argv: Optional[List[str]] = None) -> int:
    """Main function to run the application."""
    app = VecFontApp()
    parser = app.build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    configure_logging(args.log_level)
    if args.threads:
        import torch

        torch.set_num_threads(args.threads)

    try:
        result = app.run_command(args.command, args)
    except ApplicationError as e:
        where = e.context.additional_data.get("file")
        message = e.message if not where or where in e.message else f"{where}: {e.message}"
        logger.error(f"[{e.category.value}] {message}")
        for hint in e.recovery_suggestions:
            logger.info(f"hint: {hint}")
        print(f"error: {message}", file=sys.stderr)
        return e.exit_code
    except KeyboardInterrupt:
        logger.warning("interrupted")
        return 130

    if result is not None:
        logger.info(f"{args.command} done:\n{format_output(result)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
