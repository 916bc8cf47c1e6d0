"""
SPDX-License-Identifier: MIT
"""

from argparse import ArgumentTypeError

import hjson
import pytest

from vradam.__about__ import __version__
from vradam.config import DEFAULTS, dump_effective_config, load_config
from vradam.config.parser import OUTPUT_ROOT_ENV

@pytest.fixture(autouse=True)
def no_output_root_env(monkeypatch):
    monkeypatch.delenv(OUTPUT_ROOT_ENV, raising=False)

def test_defaults_without_file():
    cfg = load_config(None, 'divergence')

    assert cfg.command == 'divergence'
    assert cfg.trials == DEFAULTS['divergence']['trials']
    assert cfg.output_root == 'out'
    with pytest.raises(AttributeError):
        _ = cfg.epochs

def test_sample_config_matches_defaults():
    for command in ('divergence', 'train', 'verify', 'reset_compare'):
        cfg = load_config('vradam/sample.config.hjson', command)
        expected = {**DEFAULTS['general'], **DEFAULTS[command]}
        assert cfg.values == expected

def test_dashed_command_name():
    assert load_config(None, 'reset-compare').command == 'reset_compare'

def test_unknown_command():
    with pytest.raises(ArgumentTypeError):
        load_config(None, 'benchmark')

@pytest.mark.parametrize('content', ['{divergence: {trails: 10}}', '{plots: {}}', '{general: {seed: 3}}'])
def test_unknown_keys(tmp_path, content):
    path = tmp_path / 'config.hjson'
    path.write_text(content, encoding='utf8')

    with pytest.raises(ArgumentTypeError):
        load_config(str(path), 'divergence')

def test_file_values_and_overrides(tmp_path):
    path = tmp_path / 'config.hjson'
    path.write_text('{\n  # fewer trials\n  divergence: {trials: 20, steps: 50}\n}', encoding='utf8')

    cfg = load_config(str(path), 'divergence', {'steps': 80, 'delta': None})
    assert (cfg.trials, cfg.steps, cfg.delta) == (20, 80, 10.0)

def test_unknown_override():
    with pytest.raises(ArgumentTypeError):
        load_config(None, 'verify', {'trials': 3})

def test_environment_output_root(monkeypatch):
    monkeypatch.setenv(OUTPUT_ROOT_ENV, '/tmp/elsewhere')

    assert load_config(None, 'verify').output_root == '/tmp/elsewhere'
    assert load_config(None, 'verify', {'output_root': 'here'}).output_root == 'here'

def test_malformed_file(tmp_path):
    path = tmp_path / 'config.hjson'
    path.write_text('{divergence: {trials: [}', encoding='utf8')

    with pytest.raises(hjson.HjsonDecodeError):
        load_config(str(path), 'divergence')

def test_dump_effective_config(tmp_path):
    cfg = load_config(None, 'reset_compare', {'seeds': 7})
    path = dump_effective_config(cfg, str(tmp_path / 'out'))

    with open(path, 'r', encoding='utf8') as dumped:
        values = hjson.load(dumped)

    assert values['command'] == 'reset_compare'
    assert values['version'] == __version__
    assert values['seeds'] == 7
    assert values['rates'] == [0.3, 2.6]
