"""
SPDX-License-Identifier: MIT

Output emitters: CSV tables, SVG line charts and key-value summaries.

Every emitter is deterministic: the same input always produces the same bytes.
"""

import csv
import logging
import math
import os
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT, PADDING, LEGEND_HEIGHT = 640, 400, 60, 18

COLORS = ('#1f77b4', '#d62728', '#2ca02c', '#ff7f0e', '#9467bd', '#8c564b', '#e377c2', '#7f7f7f')

@dataclass(frozen=True)
class LineSeries:
    """
    One polyline of a chart.
    """
    label: str
    x: Sequence[float]
    y: Sequence[float]

@dataclass(frozen=True)
class AxisConfig:
    """
    Chart axes: titles, and whether the y axis is logarithmic.
    """
    x_label: str = 'step'
    y_label: str = 'value'
    log_y: bool = False
    title: str = ''

def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> int:
    """
    Write a CSV file with a header row (floats use `repr` precision so they read back exactly).

    Returns:
        The number of data rows written.

    Raises:
        OSError: If the file cannot be written.
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)

    count = 0
    with open(path, 'w', encoding='utf8', newline='') as out:
        writer = csv.writer(out)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(value)) if isinstance(value, (float, np.floating)) else value for value in row])
            count += 1

    logging.info('Wrote %i rows of data to %s [SUCCESS]', count, path)
    return count

def format_summary(entries: Mapping[str, object]) -> str:
    """
    Format a key-value summary, one `key=value` per line, booleans as `true`/`false`.
    """
    lines = []
    for key, value in entries.items():
        if isinstance(value, (bool, np.bool_)):
            value = 'true' if value else 'false'
        elif isinstance(value, (float, np.floating)):
            value = f'{float(value):.10g}'
        lines.append(f'{key}={value}')

    return '\n'.join(lines) + '\n'

def write_summary(path: str, blocks: Iterable[Mapping[str, object]]) -> None:
    """
    Write key-value blocks separated by blank lines.
    """
    with open(path, 'w', encoding='utf8') as out:
        out.write('\n'.join(format_summary(block) for block in blocks))

    logging.info('Wrote summary to %s', path)

def _fmt(value: float) -> str:
    return f'{value:.2f}'

def emit_svg_lines(series: Sequence[LineSeries], axes: AxisConfig = AxisConfig()) -> str: #pylint: disable=too-many-locals
    """
    Render line series as a standalone SVG 1.1 chart with a legend and linear or logarithmic y axis.

    On a logarithmic axis, non-positive values are floored at a tenth of the smallest positive value and a comment
    node records how many values were floored.

    Args:
        series: The series to draw (at least one, each with at least one point).
        axes: The axis configuration.

    Returns:
        The SVG document.

    Raises:
        ValueError: If there is no series, an empty series, or mismatched coordinates.
    """
    if not series:
        raise ValueError('Cannot draw a chart without series')
    for line in series:
        if len(line.x) == 0 or len(line.x) != len(line.y):
            raise ValueError(f'Series "{line.label}" is empty or has mismatched coordinates')

    xs = [np.asarray(line.x, dtype=np.float64) for line in series]
    ys = [np.asarray(line.y, dtype=np.float64) for line in series]

    comments = []
    if axes.log_y:
        positive = np.concatenate([y[y > 0] for y in ys])
        floor = float(positive.min()) / 10 if positive.size else 1e-300
        floored = sum(int(np.count_nonzero(y <= 0)) for y in ys)
        if floored:
            comments.append(f'<!-- warning: {floored} non-positive value(s) floored at {floor:.6g} on the log axis -->')
            logging.warning('Floored %i non-positive value(s) at %.6g on the log axis', floored, floor)
        ys = [np.log10(np.maximum(y, floor)) for y in ys]

    x_lo, x_hi = min(float(x.min()) for x in xs), max(float(x.max()) for x in xs)
    y_lo, y_hi = min(float(y.min()) for y in ys), max(float(y.max()) for y in ys)
    x_span, y_span = (x_hi - x_lo) or 1.0, (y_hi - y_lo) or 1.0

    plot_w, plot_h = WIDTH - 2*PADDING, HEIGHT - 2*PADDING

    def _point(x: float, y: float) -> str:
        return f'{_fmt(PADDING + (x - x_lo)/x_span*plot_w)},{_fmt(HEIGHT - PADDING - (y - y_lo)/y_span*plot_h)}'

    svg = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        *comments,
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{PADDING}" y1="{HEIGHT - PADDING}" x2="{WIDTH - PADDING}" y2="{HEIGHT - PADDING}" stroke="black"/>',
        f'<line x1="{PADDING}" y1="{PADDING}" x2="{PADDING}" y2="{HEIGHT - PADDING}" stroke="black"/>',
    ]

    for i in range(5):
        y_value = y_lo + y_span*i/4
        y = HEIGHT - PADDING - plot_h*i/4
        label = f'1e{y_value:.1f}' if axes.log_y else f'{y_value:.4g}'
        svg.append(f'<line x1="{PADDING}" y1="{_fmt(y)}" x2="{WIDTH - PADDING}" y2="{_fmt(y)}" stroke="#ddd" '
                   'stroke-dasharray="4"/>')
        svg.append(f'<text x="{PADDING - 5}" y="{_fmt(y + 4)}" font-family="sans-serif" font-size="10" '
                   f'text-anchor="end">{label}</text>')

        x_value = x_lo + x_span*i/4
        x = PADDING + plot_w*i/4
        svg.append(f'<text x="{_fmt(x)}" y="{HEIGHT - PADDING + 15}" font-family="sans-serif" font-size="10" '
                   f'text-anchor="middle">{x_value:.4g}</text>')

    svg.append(f'<text x="{WIDTH/2:.0f}" y="{HEIGHT - 15}" font-family="sans-serif" font-size="12" '
               f'text-anchor="middle">{escape(axes.x_label)}</text>')
    svg.append(f'<text x="15" y="{HEIGHT/2:.0f}" font-family="sans-serif" font-size="12" text-anchor="middle" '
               f'transform="rotate(-90 15 {HEIGHT/2:.0f})">{escape(axes.y_label)}</text>')
    if axes.title:
        svg.append(f'<text x="{WIDTH/2:.0f}" y="20" font-family="sans-serif" font-size="14" '
                   f'text-anchor="middle">{escape(axes.title)}</text>')

    for n, (line, x, y) in enumerate(zip(series, xs, ys)):
        color = COLORS[n % len(COLORS)]
        points = ' '.join(_point(a, b) for a, b in zip(x, y) if math.isfinite(a) and math.isfinite(b))
        svg.append(f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.5"/>')

        legend_y = PADDING + n*LEGEND_HEIGHT
        svg.append(f'<line x1="{WIDTH - PADDING - 150}" y1="{legend_y}" x2="{WIDTH - PADDING - 130}" y2="{legend_y}" '
                   f'stroke="{color}" stroke-width="2"/>')
        svg.append(f'<text x="{WIDTH - PADDING - 125}" y="{legend_y + 4}" font-family="sans-serif" '
                   f'font-size="10">{escape(line.label)}</text>')

    svg.append('</svg>')
    return '\n'.join(svg) + '\n'

def write_svg(path: str, series: Sequence[LineSeries], axes: AxisConfig = AxisConfig()) -> None:
    with open(path, 'w', encoding='utf8') as out:
        out.write(emit_svg_lines(series, axes))

    logging.info('Wrote chart to %s', path)
