"""
SPDX-License-Identifier: MIT

Configuration layer: hjson config files with per-command sections, command-line overrides and effective config echo.
"""

from vradam.config.parser import COMMANDS, DEFAULTS, RunConfig, dump_effective_config, load_config
