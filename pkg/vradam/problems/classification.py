"""
SPDX-License-Identifier: MIT

Cross-entropy classification losses over a `Dataset`: multinomial logistic regression and a two-layer feedforward
network with tanh hidden units. Each sample is one component of the finite sum and all gradients are derived by hand.
"""

import numpy as np
import numpy.typing as npt
from scipy.special import logsumexp, softmax

from vradam.numerics import DenseVector, RandomSource
from vradam.problems.base import FiniteSumProblem
from vradam.problems.datasets import Dataset

def _cross_entropy(logits: npt.NDArray[np.float64], labels: npt.NDArray[np.int64]) -> float:
    return float(np.mean(logsumexp(logits, axis=1) - logits[np.arange(labels.size), labels]))

def _cross_entropy_delta(logits: npt.NDArray[np.float64], labels: npt.NDArray[np.int64]) -> npt.NDArray[np.float64]:
    """
    Gradient of the mean cross-entropy with respect to the logits: `(softmax(z) - onehot(y)) / b`.
    """
    delta = softmax(logits, axis=1)
    delta[np.arange(labels.size), labels] -= 1
    return delta / labels.size

class LogisticRegression(FiniteSumProblem):
    """
    Multinomial logistic regression with an optional intercept and L2 penalty.

    The parameter vector is the row-major flattening of the `d' x K` weight matrix, where `d'` counts the intercept
    column when `fit_intercept` is set.

    Attributes:
        dataset: The training data.
        l2: The L2 penalty `l2/2 ‖w‖²` added to every component.
        design: The `N x d'` design matrix.
    """
    def __init__(self, dataset: Dataset, l2: float = 0.0, batch_size: int = 1, fit_intercept: bool = True) -> None:
        self.dataset = dataset
        self.l2 = l2
        self.design = dataset.features
        if fit_intercept:
            self.design = np.hstack([dataset.features, np.ones((dataset.n_samples, 1))])

        self.n_components = dataset.n_samples
        self.batch_size = batch_size
        self.n_classes = dataset.n_classes
        self.dimension = self.design.shape[1]*self.n_classes
        self.name = f'logistic regression on {dataset.name} (l2={l2:g})'

        max_norm = float(np.max(np.linalg.norm(self.design, axis=1)))
        self.L = 0.5*max_norm**2 + l2
        self.c = l2 if l2 > 0 else None
        self.G_bound = np.sqrt(2)*max_norm if l2 == 0 else None

    def _weights(self, w: DenseVector) -> npt.NDArray[np.float64]:
        return w.reshape(self.design.shape[1], self.n_classes)

    def _rows(self, indices: npt.NDArray[np.int64] | None) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.int64]]:
        if indices is None:
            return self.design, self.dataset.labels

        return self.design[indices], self.dataset.labels[indices]

    def batch_loss(self, w: DenseVector, indices: npt.NDArray[np.int64] | None = None) -> float:
        features, labels = self._rows(indices)
        return _cross_entropy(features @ self._weights(w), labels) + 0.5*self.l2*float(np.dot(w, w))

    def batch_gradient(self, w: DenseVector, indices: npt.NDArray[np.int64] | None = None) -> DenseVector:
        features, labels = self._rows(indices)
        delta = _cross_entropy_delta(features @ self._weights(w), labels)
        return (features.T @ delta).reshape(-1) + self.l2*w

class FeedforwardNetwork(FiniteSumProblem):
    """
    A two-layer network `input -> tanh(hidden) -> classes` trained with cross-entropy.

    The parameter vector concatenates `W1 (d x h)`, `b1 (h)`, `W2 (h x K)` and `b2 (K)`, each flattened row-major.

    Attributes:
        dataset: The training data.
        hidden: The width `h` of the hidden layer.
        seed: The seed of the default random initialization.
    """
    def __init__(self, dataset: Dataset, hidden: int, batch_size: int = 1, seed: int = 0) -> None:
        self.dataset = dataset
        self.hidden = hidden
        self.seed = seed

        self.n_components = dataset.n_samples
        self.batch_size = batch_size
        self.n_inputs = dataset.n_features
        self.n_classes = dataset.n_classes
        self.dimension = self.n_inputs*hidden + hidden + hidden*self.n_classes + self.n_classes
        self.name = f'feedforward network {self.n_inputs}->{hidden}->{self.n_classes} on {dataset.name}'

    def unpack(self, w: DenseVector) -> tuple[npt.NDArray[np.float64], ...]:
        """
        Split the parameter vector into `(W1, b1, W2, b2)` views.
        """
        d, h, k = self.n_inputs, self.hidden, self.n_classes
        splits = np.cumsum([d*h, h, h*k])
        w1, b1, w2, b2 = np.split(w, splits)

        return w1.reshape(d, h), b1, w2.reshape(h, k), b2

    def _forward(self, w: DenseVector, indices: npt.NDArray[np.int64] | None):
        features = self.dataset.features if indices is None else self.dataset.features[indices]
        labels = self.dataset.labels if indices is None else self.dataset.labels[indices]
        w1, b1, w2, b2 = self.unpack(w)
        activations = np.tanh(features @ w1 + b1)

        return features, labels, activations, activations @ w2 + b2

    def batch_loss(self, w: DenseVector, indices: npt.NDArray[np.int64] | None = None) -> float:
        _, labels, _, logits = self._forward(w, indices)
        return _cross_entropy(logits, labels)

    def batch_gradient(self, w: DenseVector, indices: npt.NDArray[np.int64] | None = None) -> DenseVector:
        features, labels, activations, logits = self._forward(w, indices)
        _, _, w2, _ = self.unpack(w)

        delta_out = _cross_entropy_delta(logits, labels)
        delta_hidden = (delta_out @ w2.T) * (1 - activations**2)

        return np.concatenate([
            (features.T @ delta_hidden).reshape(-1),
            delta_hidden.sum(axis=0),
            (activations.T @ delta_out).reshape(-1),
            delta_out.sum(axis=0),
        ])

    def initial_point(self, rng: RandomSource | None = None) -> DenseVector:
        """
        Draw weights from `N(0, 1/fan_in)` with zero biases.
        """
        rng = rng or RandomSource(self.seed)
        w1 = rng.normal((self.n_inputs, self.hidden)) / np.sqrt(self.n_inputs)
        w2 = rng.normal((self.hidden, self.n_classes)) / np.sqrt(self.hidden)

        return np.concatenate([w1.reshape(-1), np.zeros(self.hidden), w2.reshape(-1), np.zeros(self.n_classes)])

def make_logistic(dataset: Dataset, l2: float = 0.0, batch_size: int = 1,
                  fit_intercept: bool = True) -> LogisticRegression:
    """
    Build the multinomial logistic regression finite sum.

    The declared smoothness is `½·maxₙ‖xₙ‖² + l2` (the softmax Hessian has norm at most ½), the strong convexity is
    `l2` when positive, and the gradient bound `√2·maxₙ‖xₙ‖` is declared only without penalty.

    Raises:
        ValueError: If `l2 < 0` or the dataset is empty.
    """
    if l2 < 0:
        raise ValueError(f'L2 penalty must be non-negative, got {l2}')
    if dataset.n_samples < 1:
        raise ValueError('Cannot build a loss over an empty dataset')

    return LogisticRegression(dataset, l2, batch_size, fit_intercept)

def make_mlp(dataset: Dataset, hidden: int, batch_size: int = 1, seed: int = 0) -> FeedforwardNetwork:
    """
    Build the two-layer feedforward network finite sum.

    Raises:
        ValueError: If `hidden < 1` or the dataset has no feature.
    """
    if hidden < 1:
        raise ValueError(f'Hidden layer width must be at least 1, got {hidden}')
    if dataset.n_features < 1:
        raise ValueError('Cannot build a network over a dataset without features')

    return FeedforwardNetwork(dataset, hidden, batch_size, seed)
