#!/usr/bin/env python3

"""
SPDX-License-Identifier: MIT

Main entry point of the application.
"""

import logging
import os
import sys
from argparse import ArgumentTypeError
from datetime import datetime
from pprint import pformat

from dotenv import load_dotenv
from hjson import HjsonDecodeError

from vradam.args import config_overrides, parse_arguments
from vradam.commands import COMMAND_FUNCTIONS
from vradam.config.parser import load_config
from vradam.exceptions import ConfigurationError, ConstructionError, DatasetFormatError, LabelError, ToolkitException

CONSOLE_HANDLER = logging.StreamHandler()

EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_IO = 1, 2, 3

INPUT_ERRORS = (ArgumentTypeError, ConfigurationError, ConstructionError, DatasetFormatError, LabelError, ValueError)

def setup_logging(log: str | None, quiet: bool, overwrite_log: bool) -> None:
    """
    Log to the console (errors only when `quiet`) and, when requested, to a log file.
    """
    logging_handlers = []

    log_filename = 'logs/' + datetime.today().strftime('%Y-%m-%d_%H-%M-%S') + '.log'
    if log != 'logs/{datetime}.log':
        if log:
            log_filename = log
        if os.path.dirname(log_filename):
            os.makedirs(os.path.dirname(log_filename), exist_ok=True)
        logging_handlers.append(logging.FileHandler(log_filename, mode='a+' if not overwrite_log else 'w'))

    CONSOLE_HANDLER.setLevel(logging.INFO)
    if quiet:
        # Keep only errors and critical messages
        CONSOLE_HANDLER.setLevel(logging.ERROR)

    logging_handlers.append(CONSOLE_HANDLER)

    logging.basicConfig(
        handlers=logging_handlers,
        level=logging.DEBUG,
        format='%(asctime)s:T+%(relativeCreated)d %(levelname)s %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S',
        force=True
    )

    logging.addLevelName(logging.DEBUG, '[DEBUG]')
    logging.addLevelName(logging.INFO, '[*]')
    logging.addLevelName(logging.WARNING, '[!]')
    logging.addLevelName(logging.ERROR, '[ERROR]')
    logging.addLevelName(logging.CRITICAL, '[CRITICAL]')

def main(argv: list[str] | None = None) -> int:
    """
    Main function for parsing arguments, setting up logging, loading the config and running the selected command.

    Returns:
        0 on success, 1 when a check fails, 2 on usage or configuration errors and 3 on I/O errors.
    """
    try:
        args = parse_arguments(argv)
    except SystemExit as exit_request:
        # argparse exits with 2 on usage errors and 0 on --help
        return int(exit_request.code or 0)

    setup_logging(args.log, args.quiet, args.overwrite_log)
    logging.debug('Script arguments: %s', args)

    # Environment variables (e.g. VRADAM_OUTPUT_ROOT) may come from a .env file
    load_dotenv()

    # === Config loading ===

    try:
        cfg = load_config(args.config, args.command, config_overrides(args))
    except (HjsonDecodeError, ArgumentTypeError) as error:
        logging.critical('Error loading config file: %s', error)
        return EXIT_USAGE
    except OSError as error:
        logging.critical('Could not read config file "%s": %s', args.config, error)
        return EXIT_IO

    logging.debug('Effective config: %s', pformat(cfg.as_dict()))

    # === Command run ===

    try:
        return COMMAND_FUNCTIONS[cfg.command](cfg)
    except INPUT_ERRORS as error:
        logging.critical('Invalid configuration for "%s": %s', cfg.command, error)
        return EXIT_USAGE
    except OSError as error:
        logging.critical('I/O error while running "%s": %s', cfg.command, error)
        return EXIT_IO
    except ToolkitException as error:
        logging.critical('Command "%s" failed: %s', cfg.command, error)
        return EXIT_CHECK_FAILED

if __name__ == '__main__':
    sys.exit(main())
