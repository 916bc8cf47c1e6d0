"""
SPDX-License-Identifier: MIT

Holds the gradient-estimator abstraction shared by every optimization problem.

A `StochasticProblem` exposes the objective `F`, its full gradient, a seed distribution and the gradient estimator
`G(w; seed)`. A `FiniteSumProblem` is the specialization where `F` is the average of `N` component losses and a seed is
a mini-batch of component indices, sampled uniformly without replacement.
"""

import copy
import itertools
import math
from abc import ABC, abstractmethod
from collections.abc import Hashable, Iterator
from typing import Union

import numpy as np
import numpy.typing as npt

from vradam.exceptions import DimensionError
from vradam.numerics import DenseVector, RandomSource

Seed = Union[Hashable, npt.NDArray[np.int64]]

class StochasticProblem(ABC):
    """
    An objective `F` with an unbiased stochastic gradient estimator.

    Problems are immutable after construction and can be shared read-only between threads: all randomness enters
    through the caller's `RandomSource`.

    Attributes:
        name: A short human-readable description.
        dimension: The dimension `d` of the parameter vector.
        L: The declared Lipschitz constant of the estimator gradients (None if unknown).
        G_bound: The declared bound on the estimator norm (None if the estimator is unbounded).
        c: The declared strong convexity parameter of `F` (None if not strongly convex).
        F_star: The optimal value of `F` (None if unknown).
        w_star: The minimizer of `F` (None if unknown).
        full_gradient_cost: The cost of one full gradient expressed in estimator evaluations (`N/b` for finite sums).
    """
    name: str = 'problem'
    dimension: int
    L: float | None = None
    G_bound: float | None = None
    c: float | None = None
    F_star: float | None = None
    w_star: DenseVector | None = None
    full_gradient_cost: float = 1.0

    @abstractmethod
    def loss(self, w: DenseVector) -> float:
        """
        Return the objective value `F(w)`.
        """

    @abstractmethod
    def full_gradient(self, w: DenseVector) -> DenseVector:
        """
        Return the exact gradient `∇F(w)`.
        """

    @abstractmethod
    def sample(self, rng: RandomSource) -> Seed:
        """
        Draw one seed from the problem's seed distribution.
        """

    @abstractmethod
    def estimate(self, w: DenseVector, seed: Seed) -> DenseVector:
        """
        Return the gradient estimate `G(w; seed)`.
        """

    @abstractmethod
    def seed_loss(self, w: DenseVector, seed: Seed) -> float:
        """
        Return the loss whose gradient is the estimate for `seed` (the mini-batch loss for finite sums).
        """

    def seed_distribution(self) -> Iterator[tuple[Seed, float]]:
        """
        Enumerate every seed with its exact probability.

        Raises:
            NotImplementedError: If the seed distribution is not finite.
        """
        raise NotImplementedError(f'{self.name} has no finite seed distribution')

    def initial_point(self, rng: RandomSource | None = None) -> DenseVector: #pylint: disable=unused-argument
        """
        Return a default starting point (zeros unless the model needs a random initialization).
        """
        return np.zeros(self.dimension)

    def check_dimension(self, w: DenseVector) -> None:
        """
        Raise a `DimensionError` if `w` does not have the problem's dimension.
        """
        if np.shape(w) != (self.dimension,):
            raise DimensionError(self.dimension, int(np.size(w)))

class FiniteSumProblem(StochasticProblem):
    """
    A finite sum `F(w) = (1/N) Σ f_n(w)` whose seeds are mini-batches of `b` distinct component indices.

    Subclasses implement `batch_loss` and `batch_gradient` (the mean over an index set, or over all components when
    `indices` is None).

    Attributes:
        n_components: The number of components `N`.
        batch_size: The mini-batch size `b`.
    """
    n_components: int
    batch_size: int = 1

    @abstractmethod
    def batch_loss(self, w: DenseVector, indices: npt.NDArray[np.int64] | None = None) -> float:
        """
        Return `(1/|B|) Σ_{n∈B} f_n(w)` (all components when `indices` is None).
        """

    @abstractmethod
    def batch_gradient(self, w: DenseVector, indices: npt.NDArray[np.int64] | None = None) -> DenseVector:
        """
        Return `(1/|B|) Σ_{n∈B} ∇f_n(w)` (all components when `indices` is None).
        """

    @property
    def full_gradient_cost(self) -> float:
        return self.n_components / self.batch_size

    def loss(self, w: DenseVector) -> float:
        return self.batch_loss(w)

    def full_gradient(self, w: DenseVector) -> DenseVector:
        return self.batch_gradient(w)

    def sample(self, rng: RandomSource) -> npt.NDArray[np.int64]:
        return rng.batch(self.n_components, self.batch_size)

    def estimate(self, w: DenseVector, seed: npt.NDArray[np.int64]) -> DenseVector:
        return self.batch_gradient(w, seed)

    def seed_loss(self, w: DenseVector, seed: npt.NDArray[np.int64]) -> float:
        return self.batch_loss(w, seed)

    def seed_distribution(self) -> Iterator[tuple[npt.NDArray[np.int64], float]]:
        probability = 1 / math.comb(self.n_components, self.batch_size)
        for batch in itertools.combinations(range(self.n_components), self.batch_size):
            yield np.array(batch, dtype=np.int64), probability

    def with_batch_size(self, batch_size: int) -> 'FiniteSumProblem':
        """
        Return a shallow copy of the problem sampling mini-batches of a different size.
        """
        if not 1 <= batch_size <= self.n_components:
            raise ValueError(f'Batch size {batch_size} must be in [1, {self.n_components}]')

        problem = copy.copy(self)
        problem.batch_size = batch_size
        return problem
