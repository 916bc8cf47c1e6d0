"""
SPDX-License-Identifier: MIT

Strongly convex quadratic test beds with a declared gradient bound.

Every component shares the Hessian `H = diag(c, ..., L)` and differs by a centered linear perturbation `z_n`, so the
components are `f_n(w) = ½wᵀHw + z_nᵀw` and `F(w) = ½wᵀHw` with `w* = 0` and `F* = 0`. Unbounded quadratics violate
a gradient norm bound, so component gradients are radially clipped to the declared `G_bound`: inside the clipping region
(where every `‖∇f_n(w)‖₂ <= clip`) the estimator is the exact component gradient.
"""

import logging

import numpy as np
import numpy.typing as npt

from vradam.numerics import DenseVector, RandomSource
from vradam.problems.base import FiniteSumProblem

class QuadraticSum(FiniteSumProblem):
    """
    A finite sum of quadratics sharing a diagonal Hessian, with clipped component gradients.

    Only the gradients are clipped: `loss` is the exact `½wᵀHw + mean(z_n)ᵀw` everywhere, so `full_gradient` is its
    gradient inside the clipping region only. Outside it, `full_gradient` is the mean of clipped component gradients
    and its norm stays below `clip`. Rate checks start at `initial_point()` and measure their gaps inside the region.

    Attributes:
        hessian: The diagonal of `H`, spread evenly over `[c, L]`.
        perturbations: The `N x d` matrix of centered linear terms `z_n`.
        clip: The clipping radius of the component gradients (the declared `G_bound`).
    """
    def __init__(self, hessian: DenseVector, perturbations: npt.NDArray[np.float64], clip: float,
                 batch_size: int = 1) -> None:
        self.hessian = hessian
        self.perturbations = perturbations
        self.clip = clip

        self.n_components, self.dimension = perturbations.shape
        self.batch_size = batch_size
        self.name = (f'quadratic sum (d={self.dimension}, N={self.n_components}, c={hessian.min():g}, '
                     f'L={hessian.max():g}, clip={clip:g})')
        self.L = float(hessian.max())
        self.c = float(hessian.min())
        self.G_bound = clip
        self.w_star = np.zeros(self.dimension)
        self.F_star = 0.0

    def _component_gradients(self, w: DenseVector, indices: npt.NDArray[np.int64] | None) -> npt.NDArray[np.float64]:
        rows = self.perturbations if indices is None else self.perturbations[indices]
        gradients = self.hessian*w + rows
        norms = np.linalg.norm(gradients, axis=1, keepdims=True)
        return gradients * np.minimum(1.0, self.clip / np.maximum(norms, np.finfo(np.float64).tiny))

    def batch_loss(self, w: DenseVector, indices: npt.NDArray[np.int64] | None = None) -> float:
        rows = self.perturbations if indices is None else self.perturbations[indices]
        return float(0.5*np.dot(self.hessian*w, w) + np.mean(rows @ w))

    def batch_gradient(self, w: DenseVector, indices: npt.NDArray[np.int64] | None = None) -> DenseVector:
        return np.mean(self._component_gradients(w, indices), axis=0)

    def in_clipping_region(self, w: DenseVector) -> bool:
        """
        Tell whether no component gradient is clipped at `w`.
        """
        return bool(np.all(np.linalg.norm(self.hessian*w + self.perturbations, axis=1) <= self.clip))

    def initial_point(self, rng: RandomSource | None = None) -> DenseVector: #pylint: disable=unused-argument
        """
        Return the point along the all-ones direction where `‖Hw‖₂` is half the clipping radius (minus the largest
        perturbation), well inside the clipping region.
        """
        direction = np.ones(self.dimension)
        margin = 0.5*self.clip - float(np.max(np.linalg.norm(self.perturbations, axis=1)))
        return direction * max(margin, 0.0) / float(np.linalg.norm(self.hessian*direction))

def make_quadratic(c: float, L: float, d: int, noise: float, clip: float, #pylint: disable=too-many-arguments
                   n_components: int = 10, batch_size: int = 1, seed: int = 0) -> QuadraticSum:
    """
    Build a strongly convex quadratic finite sum with Hessian spectrum in `[c, L]`.

    Args:
        c: The smallest Hessian eigenvalue (strong convexity).
        L: The largest Hessian eigenvalue (smoothness).
        d: The dimension.
        noise: The per-coordinate amplitude of the component perturbations before centering (0 gives identical
            components).
        clip: The clipping radius of the component gradients, declared as `G_bound`.
        n_components: The number of components `N`.
        batch_size: The mini-batch size `b`.
        seed: The seed of the perturbations.

    Returns:
        The quadratic finite sum.

    Raises:
        ValueError: If `c > L`, `c <= 0`, `noise < 0`, `clip <= 0` or `d < 1`.
    """
    if not 0 < c <= L:
        raise ValueError(f'Hessian spectrum requires 0 < c <= L, got c={c}, L={L}')
    if noise < 0:
        raise ValueError(f'Noise amplitude must be non-negative, got {noise}')
    if not clip > 0:
        raise ValueError(f'Clipping radius must be positive, got {clip}')
    if d < 1 or n_components < 1:
        raise ValueError(f'Invalid sizes d={d}, N={n_components}')

    hessian = np.linspace(c, L, d)
    perturbations = np.zeros((n_components, d))
    if noise > 0:
        perturbations = noise * (2*RandomSource(seed).uniforms(n_components*d).reshape(n_components, d) - 1)
        perturbations -= perturbations.mean(axis=0)

    logging.debug('Built quadratic sum: spectrum [%g, %g], d=%i, N=%i, noise=%g, clip=%g', c, L, d, n_components,
                  noise, clip)

    return QuadraticSum(hessian, perturbations, clip, batch_size)
