#!/usr/bin/env python3
"""
Qudit GME - Main Entry Point
============================

Sets up logging and dispatches to the click command group in manage.py.
The process exit code is the one returned by the command: 0 success,
1 usage error, 2 validation failure, 3 oracle-check failure.
"""

import sys
import logging
import traceback
from pathlib import Path
from typing import List, Optional

# Add the src directory to Python path for imports
current_dir = Path(__file__).parent.absolute()
sys.path.insert(0, str(current_dir))

import click

from config import get_config
from utils.error_handler import EXIT_OK, EXIT_USAGE

# Get configuration instance
config = get_config()


class LoggingConfig:
    """Configuration for application logging."""

    _configured = False

    @classmethod
    def setup_logging(cls):
        """Setup application logging configuration."""
        if cls._configured:
            return
        root_logger = logging.getLogger()
        root_logger.setLevel(config.get_log_level())
        formatter = logging.Formatter(config.LOG_FORMAT)

        if config.LOG_FILE:
            log_path = Path(config.LOG_FILE)
            log_path.parent.mkdir(parents=True, exist_ok=True)
            # Create log file handler with UTF-8 encoding
            file_handler = logging.FileHandler(log_path, encoding=config.LOG_ENCODING)
            file_handler.setFormatter(formatter)
            root_logger.addHandler(file_handler)

        # stdout carries CSV/JSON results
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(formatter)
        root_logger.addHandler(console_handler)

        cls._configured = True
        root_logger.debug("Logging initialized")


def run(argv: Optional[List[str]] = None) -> int:
    """Run one CLI invocation and return its exit code."""
    from manage import cli

    LoggingConfig.setup_logging()
    if not config.validate():
        logging.getLogger(__name__).warning("Configuration failed validation; continuing with it")
    try:
        result = cli.main(args=argv, prog_name='qudit-gme', standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    return EXIT_OK if result is None else int(result)


def main():
    """Main entry point for the qudit-gme command."""
    try:
        return run(sys.argv[1:])
    except KeyboardInterrupt:
        print("\nInterrupted by user", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:
        print(f"Fatal error: {str(e)}", file=sys.stderr)
        traceback.print_exc()
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
