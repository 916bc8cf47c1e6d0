"""
SPDX-License-Identifier: MIT
"""

import csv
import os

import pytest

from vradam.__main__ import EXIT_IO, EXIT_USAGE, main
from vradam.config import DEFAULTS
from vradam.config.parser import OUTPUT_ROOT_ENV

@pytest.fixture(autouse=True)
def no_output_root_env(monkeypatch):
    monkeypatch.delenv(OUTPUT_ROOT_ENV, raising=False)

def _summary(path: str) -> dict[str, str]:
    with open(path, 'r', encoding='utf8') as summary:
        return dict(line.strip().split('=', 1) for line in summary if '=' in line)

def _run(tmp_path, *args: str) -> int:
    return main(['-q', '-o', str(tmp_path), '-w', '2', *args])

def test_verify_single_check(tmp_path):
    assert _run(tmp_path, 'verify', '--only', 'unbiasedness') == 0

    directory = tmp_path / 'verify'
    assert (directory / 'effective_config.hjson').exists()
    report = (directory / 'verify_report.txt').read_text(encoding='utf8')
    assert 'check=unbiasedness' in report
    assert 'ok=false' not in report

def test_divergence_small(tmp_path):
    assert _run(tmp_path, 'divergence', '--trials', '4', '--steps', '50', '--warmup', '10') == 0

    directory = tmp_path / 'divergence'
    with open(directory / 'divergence.csv', 'r', encoding='utf8', newline='') as table:
        rows = list(csv.reader(table))
    assert rows[0] == ['t', 'mse_mean', 'mse_stderr', 'drift_mean', 'drift_stderr']
    assert len(rows) == 1 + 51
    assert float(rows[1][1]) == 0.0

    summary = _summary(directory / 'summary.txt')
    assert summary['trials'] == '4'
    assert summary['mse_grows'] in ('true', 'false')
    assert 'drift_positive' in summary
    assert (directory / 'divergence.svg').exists()

def test_divergence_without_drift_window(tmp_path):
    assert _run(tmp_path, '--no-svg', 'divergence', '--trials', '2', '--steps', '20', '--warmup', '20') == 0

    directory = tmp_path / 'divergence'
    assert 'drift_mean' not in _summary(directory / 'summary.txt')
    assert not (directory / 'divergence.svg').exists()

def test_divergence_vradam_on_construction(tmp_path):
    assert _run(tmp_path, 'divergence', '--problem', 'thm3', '--n-components', '6', '--optimizer', 'vradam',
                '--inner-length', '10', '--alpha', '0.01', '--beta1', '0.9', '--trials', '2', '--steps', '100',
                '--warmup', '10') == 0
    assert _summary(tmp_path / 'divergence' / 'summary.txt')['optimizer'].startswith('vradam-reset')

def test_reset_compare(tmp_path):
    assert _run(tmp_path, 'reset-compare', '--seeds', '3') == 0

    directory = tmp_path / 'reset_compare'
    with open(directory / 'reset_compare.csv', 'r', encoding='utf8', newline='') as table:
        rows = list(csv.DictReader(table))
    assert [row['seed'] for row in rows] == ['0', '1', '2']
    assert all(row['assumption3_ok'] == 'true' for row in rows)
    assert _summary(directory / 'summary.txt')['passed'] == 'true'

def test_train_small(tmp_path):
    assert _run(tmp_path, 'train', '--epochs', '3', '--seeds', '1', '--schedule', 'constant', '--alpha', '0.01',
                '--inner-length', '5') == 0

    directory = tmp_path / 'train'
    with open(directory / 'grid.csv', 'r', encoding='utf8', newline='') as table:
        grid = list(csv.DictReader(table))
    assert [row['algorithm'] for row in grid] == ['adam', 'vradam', 'vradam']
    for row in grid:
        assert os.path.exists(directory / row['file'])

    summary = _summary(directory / 'summary.txt')
    assert 'relative_gap' in summary
    assert summary['reset_not_worse'] in ('true', 'false')
    assert (directory / 'relative.csv').exists()

def test_train_default_configuration(tmp_path, thresholds):
    setup = thresholds['training']
    defaults = DEFAULTS['train']
    assert (defaults['l2'], defaults['epochs'], defaults['band'], defaults['reset_band']) == \
        (setup['l2'], setup['epochs'], setup['band'], setup['reset_band'])

    assert _run(tmp_path, '--no-svg', 'train') == 0

    summary = _summary(tmp_path / 'train' / 'summary.txt')
    assert float(summary['relative_gap']) <= setup['band']
    assert summary['within_band'] == 'true'
    assert summary['reset_not_worse'] == 'true'
    assert float(summary['reset_gap']) <= setup['reset_band']

def test_invalid_argument_exit_code(tmp_path):
    assert _run(tmp_path, 'divergence', '--trials', '0') == EXIT_USAGE

def test_invalid_configuration_exit_code(tmp_path):
    assert _run(tmp_path, 'divergence', '--delta', '0.5', '--trials', '2', '--steps', '10') == EXIT_USAGE
    assert _run(tmp_path, 'divergence', '--problem', 'thm2', '--batch-size', '12', '--trials', '2') == EXIT_USAGE

def test_missing_config_exit_code(tmp_path):
    assert _run(tmp_path, '-c', str(tmp_path / 'missing.hjson'), 'verify') == EXIT_IO

def test_unknown_config_key_exit_code(tmp_path):
    path = tmp_path / 'config.hjson'
    path.write_text('{verify: {checks: []}}', encoding='utf8')

    assert _run(tmp_path, '-c', str(path), 'verify') == EXIT_USAGE
