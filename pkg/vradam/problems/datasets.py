"""
SPDX-License-Identifier: MIT

Loads classification datasets from CSV or LIBSVM text files, or generates a seeded synthetic one.

Features are min-max normalized per column to [0, 1] (a constant column maps to all zeros) and labels are shifted to
the contiguous range `{0, ..., K-1}`.
"""

import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from vradam.exceptions import DatasetFormatError, LabelError
from vradam.numerics import RandomSource
from vradam.utils import open_file_from_package

@dataclass(frozen=True)
class Dataset:
    """
    A dense classification dataset.

    Attributes:
        features: The `N x d` feature matrix.
        labels: The `N` integer labels, in `{0, ..., K-1}`.
        n_classes: The number of classes `K`.
        name: A short description of the data source.
    """
    features: npt.NDArray[np.float64]
    labels: npt.NDArray[np.int64]
    n_classes: int
    name: str = 'dataset'

    def __post_init__(self) -> None:
        if self.features.ndim != 2 or self.features.shape[0] < 1:
            raise ValueError('A dataset needs at least one sample and a 2-dimensional feature matrix')
        if self.labels.shape != (self.features.shape[0],):
            raise ValueError(f'Expected {self.features.shape[0]} labels, got {self.labels.shape}')
        if not np.all(np.isfinite(self.features)):
            raise ValueError('Dataset features must be finite')
        if self.n_classes < 1 or np.any(self.labels < 0) or np.any(self.labels >= self.n_classes):
            raise ValueError(f'Dataset labels must lie in [0, {self.n_classes})')

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def subsample(self, n_samples: int, seed: int) -> 'Dataset':
        """
        Return a seeded subsample of `n_samples` distinct rows (in their original order).
        """
        if n_samples >= self.n_samples:
            return self

        rows = RandomSource(seed).batch(self.n_samples, n_samples)
        return Dataset(self.features[rows], self.labels[rows], self.n_classes, f'{self.name} ({n_samples} samples)')

def normalize_features(features: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """
    Min-max normalize each column to [0, 1], mapping constant columns to zero.
    """
    low = features.min(axis=0)
    span = features.max(axis=0) - low
    normalized = np.zeros_like(features)
    varying = span > 0
    normalized[:, varying] = (features[:, varying] - low[varying]) / span[varying]

    return normalized

def _contiguous_labels(raw: list[float]) -> tuple[npt.NDArray[np.int64], int]:
    distinct = sorted(set(raw))
    if any(label != int(label) for label in distinct):
        raise LabelError(distinct)

    # LIBSVM binary convention
    if distinct == [-1.0, 1.0]:
        return np.array([0 if label < 0 else 1 for label in raw], dtype=np.int64), 2

    low, high = int(distinct[0]), int(distinct[-1])
    if high - low + 1 != len(distinct):
        raise LabelError([int(label) for label in distinct])

    return np.array(raw, dtype=np.int64) - low, len(distinct)

def _parse_csv(path: str, label_column: str, label_first: bool) -> tuple[npt.NDArray[np.float64], list[float]]:
    with open_file_from_package(path, 'r') as data_file:
        header = [name.strip() for name in data_file.readline().strip().split(',')]
        if header == ['']:
            raise DatasetFormatError(path, 1, 'missing header row')

        if label_first:
            label_index = 0
        elif label_column in header:
            label_index = header.index(label_column)
        else:
            raise DatasetFormatError(path, 1, f'no label column named "{label_column}" in header {header}')

        line_numbers, lines = [], []
        for line_number, line in enumerate(data_file, start=2):
            if not line.strip(' ,\r\n'):
                continue
            if line.count(',') + 1 != len(header):
                raise DatasetFormatError(path, line_number, f'expected {len(header)} fields, got {line.count(",") + 1}')
            line_numbers.append(line_number)
            lines.append(line)

    if not lines:
        return np.empty((0, len(header) - 1)), []

    # unparsable cells come back as NaN
    table = np.genfromtxt(lines, delimiter=',', dtype=np.float64, ndmin=2)
    invalid = np.flatnonzero(~np.isfinite(table).all(axis=1))
    if invalid.size:
        raise DatasetFormatError(path, line_numbers[invalid[0]], 'non-numeric or non-finite value')

    return np.delete(table, label_index, axis=1), table[:, label_index].tolist()

def _parse_libsvm(path: str, n_features: int | None) -> tuple[list[list[float]], list[float]]:
    entries, labels = [], []
    max_index = 0
    with open_file_from_package(path, 'r') as data_file:
        for line_number, line in enumerate(data_file, start=1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue

            words = line.split()
            try:
                label = float(words[0])
                sparse = {}
                for word in words[1:]:
                    index, value = word.split(':', 1)
                    index = int(index)
                    if index < 1:
                        raise ValueError(f'feature index {index} is not 1-based')
                    sparse[index - 1] = float(value)
            except ValueError as error:
                raise DatasetFormatError(path, line_number, str(error)) from error

            if sparse:
                max_index = max(max_index, max(sparse) + 1)
            labels.append(label)
            entries.append(sparse)

    width = n_features if n_features else max_index
    if max_index > width:
        raise DatasetFormatError(path, len(entries), f'feature index {max_index} exceeds declared width {width}')

    rows = []
    for sparse in entries:
        row = [0.0]*width
        for index, value in sparse.items():
            row[index] = value
        rows.append(row)

    return rows, labels

def load_dataset(path: str, fmt: str = 'csv', label_column: str = 'y', label_first: bool = False,
                 n_features: int | None = None) -> Dataset:
    """
    Load a classification dataset from a text file.

    Args:
        path: The dataset file path (packaged resources are resolved as a fallback).
        fmt: One of `csv` (header row, comma-separated) or `libsvm` (sparse `label index:value` lines, 1-based indices).
        label_column: The CSV header name of the label column.
        label_first: Use the first CSV column as the label, whatever its name.
        n_features: The LIBSVM feature width (default: the largest index found).

    Returns:
        The parsed dataset with min-max normalized features and contiguous labels.

    Raises:
        DatasetFormatError: If a line fails to parse (the line number is reported).
        LabelError: If the distinct labels are not a contiguous integer range.
        ValueError: If the format is unknown.
    """
    if fmt == 'csv':
        rows, raw_labels = _parse_csv(path, label_column, label_first)
    elif fmt == 'libsvm':
        rows, raw_labels = _parse_libsvm(path, n_features)
    else:
        raise ValueError(f'Unknown dataset format "{fmt}": must be one of "csv" or "libsvm"')

    if len(rows) == 0:
        raise DatasetFormatError(path, 1, 'no samples found')

    features = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(features)):
        line = int(np.argwhere(~np.isfinite(features))[0][0]) + 1
        raise DatasetFormatError(path, line, 'non-finite feature value')

    labels, n_classes = _contiguous_labels(raw_labels)
    dataset = Dataset(normalize_features(features), labels, n_classes, path)
    logging.info('Loaded dataset "%s": N=%i, d=%i, K=%i', path, dataset.n_samples, dataset.n_features, n_classes)

    return dataset

def make_synthetic_dataset(n_samples: int, n_features: int, n_classes: int, seed: int = 0,
                           separation: float = 1.0) -> Dataset:
    """
    Generate a seeded Gaussian-blob classification dataset.

    Class means are drawn once from a standard normal scaled by `separation`; every sample is its class mean plus
    standard normal noise. Labels cycle through the classes so the class sizes differ by at most one. Features are
    min-max normalized like loaded files.

    Raises:
        ValueError: If a size is not positive or `n_classes < 2`.
    """
    if n_samples < 1 or n_features < 1:
        raise ValueError(f'Invalid sizes N={n_samples}, d={n_features}')
    if n_classes < 2:
        raise ValueError(f'A classification dataset needs at least 2 classes, got {n_classes}')

    rng = RandomSource(seed)
    means = separation * rng.normal((n_classes, n_features))
    labels = np.arange(n_samples, dtype=np.int64) % n_classes
    features = means[labels] + rng.normal((n_samples, n_features))

    return Dataset(
        normalize_features(features), labels, n_classes,
        f'synthetic (N={n_samples}, d={n_features}, K={n_classes}, seed={seed})'
    )
