"""
SPDX-License-Identifier: MIT

Utility functions for other modules.
"""

import asyncio
import logging
import threading
from importlib.resources import files
from typing import TextIO

def get_current_task_name() -> str:
    """
    Helper function for generating a unique name for the running `asyncio` task or worker thread.

    Returns:
        A string uniquely identifying the task (`Task-07`) or, outside of an event loop, the thread.
    """
    try:
        task = asyncio.current_task()
    except RuntimeError:
        task = None

    if task is None:
        return threading.current_thread().name

    prefix, task_id = task.get_name().rsplit('-', 1)

    # Add leading zeroes for single digit task ids to keep log lines aligned
    return f'{prefix}-{task_id.zfill(2)}'

def open_file_from_package(path: str, mode: str = 'r') -> TextIO:
    """
    Try to open a file (read-only) using the standard `open` function.
    If the file is not found, try to open it from the package install directory as a relative path.

    Args:
        path: A file path or relative path of the resource inside the package install directory
            (e.g. `vradam/sample.config.hjson`).
        mode: Only `r` (text) is supported.

    Returns:
        A text stream to use in a `with` statement.

    Raises:
        FileNotFoundError: If the file specified by `path` doesn't exists.
        IsADirectoryError: If the file specified by `path` is a directory.
        ValueError: If the `mode` argument is not `r`.
    """
    if mode != 'r':
        raise ValueError('`mode` argument must be `r` (text).')

    try:
        file = open(path, mode, encoding='utf8') #pylint: disable=consider-using-with
    except FileNotFoundError:
        if not '/' in path:
            path = f'vradam/{path}'

        package, resource = path.split('/', 1)

        try:
            file = files(package).joinpath(resource).open('r', encoding='utf8')
        except (ModuleNotFoundError, FileNotFoundError, TypeError, ValueError) as error:
            logging.error('Could not open "%s" as a local file or package resource file.', path)
            raise FileNotFoundError(f'Could not open "{path}" as a local file or package resource file.') from error

    return file
