"""
SPDX-License-Identifier: MIT

Deterministic numeric foundation shared by every other module: dense vectors, seedable random streams,
finite-difference differentiation, scalar root finding and running series statistics.

All arithmetic happens in 64-bit floating point. Any non-finite intermediate raises an `EvaluationError` instead of
propagating, so that iterates drifting away from the optimum are never confused with a numeric overflow.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy import optimize

from vradam.exceptions import BracketError, DimensionError, EvaluationError

DenseVector = npt.NDArray[np.float64]

def as_vector(values, what: str = 'vector') -> DenseVector:
    """
    Convert `values` to a fresh one-dimensional float64 vector, checking that every entry is finite.

    Args:
        values: A scalar, sequence or array of real values.
        what: A description of the vector used in error messages.

    Returns:
        A new `DenseVector` of length at least 1.

    Raises:
        EvaluationError: If an entry is NaN or infinite.
        ValueError: If the vector would be empty.
    """
    vector = np.array(values, dtype=np.float64).reshape(-1)
    if vector.size == 0:
        raise ValueError(f'{what} must have at least one entry')

    check_finite(vector, what)
    return vector

def check_finite(values, what: str, step: int | None = None, location: tuple[int, int] | None = None) -> None:
    """
    Raise an `EvaluationError` if any entry of `values` is NaN or infinite.

    Args:
        values: A scalar or array to check.
        what: A description of the checked quantity.
        step: An optional step index reported in the error.
        location: An optional `(t, k)` location reported in the error.

    Raises:
        EvaluationError: If a non-finite entry is found.
    """
    if not np.all(np.isfinite(values)):
        raise EvaluationError(what, step=step, location=location)

def check_same_length(x: DenseVector, y: DenseVector) -> None:
    """
    Raise a `DimensionError` if `x` and `y` have different lengths.
    """
    if x.shape != y.shape:
        raise DimensionError(x.size, y.size)

def axpy(a: float, x: DenseVector, y: DenseVector) -> DenseVector:
    """
    Return `a*x + y` elementwise as a new vector.

    Raises:
        DimensionError: If `x` and `y` have different lengths.
        EvaluationError: If `a` is not finite.
    """
    check_same_length(x, y)
    check_finite(a, 'axpy scale')

    return a * x + y

def finite_difference_gradient(f: Callable[[DenseVector], float], w: DenseVector, h: float = 1e-6) -> DenseVector:
    """
    Approximate the gradient of `f` at `w` with central differences.

    Each coordinate is `(f(w + h*e_i) - f(w - h*e_i)) / 2h`.

    Args:
        f: A scalar function on vectors.
        w: The point of evaluation.
        h: The (positive) step of the difference.

    Returns:
        The finite-difference gradient, same length as `w`.

    Raises:
        EvaluationError: If `f` returns a non-finite value.
        ValueError: If `h` is not positive.
    """
    if not h > 0:
        raise ValueError(f'Finite-difference step must be positive, got {h}')

    w = np.asarray(w, dtype=np.float64)
    gradient = np.empty_like(w)
    shifted = w.copy()
    for i in range(w.size):
        shifted[i] = w[i] + h
        f_plus = f(shifted)
        shifted[i] = w[i] - h
        f_minus = f(shifted)
        shifted[i] = w[i]

        check_finite([f_plus, f_minus], f'finite-difference evaluation (coordinate {i})')
        gradient[i] = (f_plus - f_minus) / (2*h)

    return gradient

def bisect_root(g: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """
    Find a root of the scalar function `g` inside the bracket `[lo, hi]` by bisection.

    The bracket halves at each iteration until its width is below `tol`. An endpoint where `g` vanishes exactly is
    returned as is.

    Args:
        g: A continuous scalar function.
        lo: The lower end of the bracket.
        hi: The upper end of the bracket.
        tol: The absolute tolerance on the root location.

    Returns:
        The root location.

    Raises:
        BracketError: If `g(lo)` and `g(hi)` have the same sign.
        ValueError: If `tol` is not positive or `lo >= hi`.
    """
    if not tol > 0:
        raise ValueError(f'Tolerance must be positive, got {tol}')
    if not lo < hi:
        raise ValueError(f'Invalid bracket [{lo}, {hi}]')

    g_lo, g_hi = g(lo), g(hi)
    check_finite([g_lo, g_hi], 'bracket evaluation')

    if g_lo == 0:
        return lo
    if g_hi == 0:
        return hi
    if np.sign(g_lo) == np.sign(g_hi):
        raise BracketError(lo, hi, g_lo, g_hi)

    root, result = optimize.bisect(g, lo, hi, xtol=tol, maxiter=500, full_output=True)
    logging.debug('Bisection converged to %.12g in %i iterations', root, result.iterations)

    return float(root)

class RandomSource:
    """
    A seedable stream of random samples.

    Backed by the counter-based Philox generator so that an identical `(seed, stream_id)` pair yields an identical
    sequence on every platform, while distinct `stream_id` values yield independent streams. A source is owned by a
    single run and must never be shared between threads.

    Attributes:
        seed: The 64-bit base seed.
        stream_id: The 64-bit stream identifier (one per Monte-Carlo trial).
        draws: The number of sampling calls made so far.
    """
    def __init__(self, seed: int, stream_id: int = 0) -> None:
        if seed < 0 or stream_id < 0:
            raise ValueError('Seed and stream id must be non-negative')

        self.seed = seed
        self.stream_id = stream_id
        self.draws = 0
        self._generator = np.random.Generator(
            np.random.Philox(np.random.SeedSequence(seed, spawn_key=(stream_id,)))
        )

    def __repr__(self) -> str:
        return f'RandomSource(seed={self.seed}, stream_id={self.stream_id}, draws={self.draws})'

    def uniform(self) -> float:
        """
        Return one sample of the uniform distribution on [0, 1).
        """
        self.draws += 1
        return float(self._generator.random())

    def uniforms(self, size: int) -> DenseVector:
        """
        Return `size` samples of the uniform distribution on [0, 1).
        """
        self.draws += 1
        return self._generator.random(size)

    def normal(self, size: int | tuple[int, ...]) -> DenseVector:
        """
        Return standard normal samples with the given shape.
        """
        self.draws += 1
        return self._generator.standard_normal(size)

    def batch(self, population: int, size: int) -> npt.NDArray[np.int64]:
        """
        Sample a batch of `size` distinct indices from `range(population)`, uniformly without replacement.

        Returns:
            The sorted batch indices.
        """
        if not 1 <= size <= population:
            raise ValueError(f'Batch size {size} must be in [1, {population}]')

        self.draws += 1
        return np.sort(self._generator.choice(population, size=size, replace=False, shuffle=False))

    def spawn(self, stream_id: int) -> 'RandomSource':
        """
        Return a fresh source on the same seed but a different stream.
        """
        return RandomSource(self.seed, stream_id)

@dataclass
class SeriesStats:
    """
    Running mean and variance (Welford's algorithm) of a series of scalars or of equally shaped arrays.

    Arrays are accumulated elementwise, so a `SeriesStats` fed with per-trial metric series yields per-step
    Monte-Carlo estimates.

    Attributes:
        count: The number of values pushed.
        mean: The running mean.
        m2: The running sum of squared deviations from the mean.
    """
    count: int = 0
    mean: float | DenseVector = 0.0
    m2: float | DenseVector = 0.0

    @classmethod
    def from_values(cls, values) -> 'SeriesStats':
        """
        Build the statistics of an iterable of values, pushed in order.
        """
        stats = cls()
        for value in values:
            stats.push(value)

        return stats

    def push(self, value) -> None:
        """
        Add one value (scalar or array) to the series.
        """
        value = np.asarray(value, dtype=np.float64)
        check_finite(value, 'series value')

        self.count += 1
        delta = value - self.mean
        self.mean = self.mean + delta / self.count
        self.m2 = self.m2 + delta * (value - self.mean)

    @property
    def variance(self) -> float | DenseVector:
        """
        The unbiased sample variance `m2/(count-1)` (zero with fewer than two values).
        """
        if self.count < 2:
            return np.zeros_like(np.asarray(self.mean, dtype=np.float64))

        return np.maximum(np.asarray(self.m2) / (self.count - 1), 0.0)

    @property
    def stderr(self) -> float | DenseVector:
        """
        The standard error of the mean.
        """
        if self.count == 0:
            return np.zeros_like(np.asarray(self.mean, dtype=np.float64))

        return np.sqrt(self.variance / self.count)
