"""
SPDX-License-Identifier: MIT

Parses the run configuration file for use by the command-line tool.
Refer to the [`README.md`](../../../README.md) and the comments of `sample.config.hjson` for details about each key.
"""

import copy
import logging
import os
from argparse import ArgumentTypeError
from typing import Any

# https://hjson.github.io/hjson-py/ -- allow comments in JSON files for configuration purposes
import hjson

from vradam.__about__ import __version__
from vradam.optimizers.schedules import ALPHA_GRID, GAMMA_GRID, INNER_LENGTH_FACTORS
from vradam.utils import open_file_from_package

OUTPUT_ROOT_ENV = 'VRADAM_OUTPUT_ROOT'

COMMANDS = ('divergence', 'train', 'verify', 'reset_compare')

DEFAULTS: dict[str, dict[str, Any]] = {
    'general': {
        'output_root': 'out',
        'base_seed': 0,
        'workers': 8,
        'svg': True,
    },
    'divergence': {
        'problem': 'op',
        'delta': 10.0,
        'n_components': 10,
        'batch_size': 1,
        'w0': -100.0,
        'trials': 1000,
        'steps': 10000,
        'warmup': 1000,
        'optimizer': 'adam',
        'option': 'A',
        'inner_length': 32,
        'schedule': 'constant',
        'alpha': 0.001,
        'gamma': None,
        'beta1': 0.0,
        'beta2': 0.999,
        'epsilon': 1e-12,
    },
    'train': {
        'dataset': None,
        'format': 'csv',
        'label_column': 'y',
        'label_first': False,
        'n_samples': 2000,
        'n_features': 10,
        'n_classes': 3,
        'model': 'logistic',
        'hidden': 16,
        'l2': 0.1,
        'batch_size': 64,
        'optimizers': ['adam', 'vradam'],
        'options': ['A', 'B'],
        'schedules': ['constant', 'inv_t', 'exp'],
        'alphas': list(ALPHA_GRID),
        'gammas': list(GAMMA_GRID),
        'inner_factors': list(INNER_LENGTH_FACTORS),
        'inner_lengths': None,
        'epochs': 30,
        'seeds': 3,
        'beta1': 0.9,
        'beta2': 0.999,
        'epsilon': 1e-8,
        'bias_correction': False,
        'band': 0.05,
        'reset_band': 0.01,
    },
    'verify': {
        'only': None,
        'negative_controls': False,
    },
    'reset_compare': {
        'seeds': 100,
        'beta1': 0.9,
        'beta2': 0.999,
        'epsilon': 0.6,
        'inner_length': 5,
        'rates': [0.3, 2.6],
        'G': 1.0,
        'w0': 0.8,
        'spread': 0.2,
        'n_components': 10,
        'batch_size': 1,
    },
}

class RunConfig:
    """
    Holds the effective configuration of one command: the `general` keys and the command's own section, flattened.

    Keys are readable as attributes (`cfg.trials`).
    """
    def __init__(self, command: str, values: dict[str, Any]) -> None:
        self.command = command
        self.values = values

    def __getattr__(self, key: str) -> Any:
        try:
            return self.__dict__['values'][key]
        except KeyError as error:
            raise AttributeError(f'No configuration key "{key}" for command "{self.command}"') from error

    def __repr__(self) -> str:
        return f'RunConfig({self.command}, {self.values})'

    def as_dict(self) -> dict[str, Any]:
        return {'command': self.command, 'version': __version__, **self.values}

def _check_keys(section: str, options: dict) -> None:
    unknown = sorted(set(options) - set(DEFAULTS[section]))
    if unknown:
        raise ArgumentTypeError(f'Unknown key(s) {unknown} in the "{section}" section of the config file')

def load_config(file: str | None, command: str, overrides: dict[str, Any] | None = None) -> RunConfig:
    """
    Load the configuration of `command` from a config file, then apply the `VRADAM_OUTPUT_ROOT` environment variable and
    the command-line overrides (a `None` override keeps the configured value).

    Args:
        file: A local path (or package resource path) of the configuration file, or None for the defaults only.
        command: One of `COMMANDS` (dashes are accepted in place of underscores).
        overrides: The values given on the command line.

    Returns:
        The effective configuration.

    Raises:
        ArgumentTypeError: If the command, a section or a key is not recognized.
        HjsonDecodeError: If the `hjson` module fails to parse the configuration file.
    """
    command = command.replace('-', '_')
    if command not in COMMANDS:
        raise ArgumentTypeError(f'Unknown command "{command}": must be one of {COMMANDS}')

    options = {}
    if file:
        with open_file_from_package(file, 'r') as config_file:
            try:
                options = hjson.load(config_file)
            except hjson.HjsonDecodeError as error:
                logging.exception('Error decoding config file (%s): %s', file, error)
                raise

    unknown_sections = sorted(set(options) - set(DEFAULTS))
    if unknown_sections:
        raise ArgumentTypeError(f'Unknown section(s) {unknown_sections} in config file "{file}"')

    values = {}
    for section in ('general', command):
        section_options = dict(options.get(section) or {})
        _check_keys(section, section_options)
        values.update(copy.deepcopy(DEFAULTS[section]))
        values.update(section_options)

    if os.getenv(OUTPUT_ROOT_ENV):
        values['output_root'] = os.getenv(OUTPUT_ROOT_ENV)

    for key, value in (overrides or {}).items():
        if key not in values:
            raise ArgumentTypeError(f'Unknown override "{key}" for command "{command}"')
        if value is not None:
            values[key] = value

    return RunConfig(command, values)

def dump_effective_config(cfg: RunConfig, directory: str) -> str:
    """
    Write the effective configuration (with the tool version) to `effective_config.hjson` in `directory`.

    Returns:
        The path of the written file.
    """
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, 'effective_config.hjson')
    with open(path, 'w', encoding='utf8') as out:
        hjson.dump(cfg.as_dict(), out)
        out.write('\n')

    logging.debug('Wrote effective config to %s', path)
    return path
