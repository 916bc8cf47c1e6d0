"""
SPDX-License-Identifier: MIT
"""

import csv

import numpy as np
import pytest

from vradam.emitters import AxisConfig, LineSeries, emit_svg_lines, format_summary, write_csv, write_summary

def test_write_csv_keeps_float_precision(tmp_path):
    path = tmp_path / 'nested' / 'table.csv'
    count = write_csv(str(path), ('t', 'value', 'label'), [(0, 0.1, 'a'), (1, np.float64(1/3), 'b')])

    with open(path, 'r', encoding='utf8', newline='') as table:
        rows = list(csv.reader(table))

    assert count == 2
    assert rows[0] == ['t', 'value', 'label']
    assert rows[1] == ['0', '0.1', 'a']
    assert float(rows[2][1]) == 1/3

def test_format_summary():
    summary = format_summary({'passed': True, 'grows': np.bool_(False), 'mse': 0.5, 'trials': 3, 'name': 'OP(10)'})
    assert summary == 'passed=true\ngrows=false\nmse=0.5\ntrials=3\nname=OP(10)\n'

def test_write_summary_blocks(tmp_path):
    path = tmp_path / 'summary.txt'
    write_summary(str(path), [{'a': 1}, {'b': 2}])

    assert path.read_text(encoding='utf8') == 'a=1\n\nb=2\n'

def test_svg_is_deterministic():
    series = [LineSeries('adam', [0, 1, 2], [1.0, 2.0, 4.0]), LineSeries('vradam <A>', [0, 1, 2], [1.0, 0.5, 0.25])]
    first, second = emit_svg_lines(series), emit_svg_lines(series)

    assert first == second
    assert first.count('<polyline') == 2
    assert 'vradam &lt;A&gt;' in first
    assert first.startswith('<?xml')

def test_svg_log_axis_floors_non_positive_values():
    chart = emit_svg_lines([LineSeries('mse', [0, 1, 2, 3], [0.0, 1e-3, 1e-2, -1.0])], AxisConfig(log_y=True))

    assert '<!-- warning: 2 non-positive value(s) floored at 0.0001 on the log axis -->' in chart

def test_svg_log_axis_without_warning():
    chart = emit_svg_lines([LineSeries('mse', [0, 1], [1.0, 10.0])], AxisConfig(log_y=True))
    assert '<!--' not in chart

@pytest.mark.parametrize('series', [[], [LineSeries('empty', [], [])], [LineSeries('mismatch', [0, 1], [1.0])]])
def test_svg_rejects_bad_series(series):
    with pytest.raises(ValueError):
        emit_svg_lines(series)
