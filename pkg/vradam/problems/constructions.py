"""
SPDX-License-Identifier: MIT

Divergence constructions for stochastic ADAM.

`OpDeltaProblem` is the unconstrained, strongly convex two-branch problem on the real line whose first branch
(probability `π(δ) = (1+δ)/(1+δ⁴)`) carries the rare, large gradient `w/δ + δ⁴`. The two finite-sum constructions
reduce, batch by batch, to exactly the same pair of losses: one with a fixed batch size `b` and `N` components, the
other with the batch size `b = N-1`.
"""

import copy
import logging

import numpy as np
import numpy.typing as npt

from vradam.exceptions import ConstructionError
from vradam.numerics import DenseVector, RandomSource, bisect_root
from vradam.problems.base import FiniteSumProblem, StochasticProblem

# Upper end of the search for the δ bracket
MAX_DELTA = 1e8

def branch_probability(delta: float) -> float:
    """
    Return `π(δ) = (1+δ)/(1+δ⁴)`, the probability of the large-gradient branch of OP(δ).
    """
    return (1 + delta) / (1 + delta**4)

def op_branches(delta: float) -> tuple[tuple[float, float], tuple[float, float]]:
    """
    Return the `(curvature, slope)` coefficients of the two OP(δ) branch losses `w²/(2δ) + δ⁴w` and `w²/(2δ) - w`.
    """
    return (1 / delta, delta**4), (1 / delta, -1.0)

class OpDeltaProblem(StochasticProblem):
    """
    The two-branch stochastic problem OP(δ) on the real line.

    `G(w; 1) = w/δ + δ⁴` with probability `p = π(δ)` and `G(w; 2) = w/δ - 1` otherwise, so that
    `F(w) = w²/(2δ) + δw`, `w* = -δ²`, `F* = -δ³/2` and `F` is `1/δ`-strongly convex.

    Attributes:
        delta: The construction parameter `δ > 1`.
        p: The probability of the first branch.
    """
    dimension = 1

    def __init__(self, delta: float) -> None:
        self.delta = float(delta)
        self.p = branch_probability(self.delta)
        self.name = f'OP({self.delta:g})'
        self.L = 1 / self.delta
        self.c = 1 / self.delta
        self.F_star = -self.delta**3 / 2
        self.w_star = np.array([-self.delta**2])

    def loss(self, w: DenseVector) -> float:
        return float(w[0]**2 / (2*self.delta) + self.delta*w[0])

    def full_gradient(self, w: DenseVector) -> DenseVector:
        return np.array([w[0] / self.delta + self.delta])

    def sample(self, rng: RandomSource) -> int:
        return 1 if rng.uniform() < self.p else 2

    def estimate(self, w: DenseVector, seed: int) -> DenseVector:
        return np.array([w[0] / self.delta + (self.delta**4 if seed == 1 else -1.0)])

    def seed_loss(self, w: DenseVector, seed: int) -> float:
        return float(w[0]**2 / (2*self.delta) + (self.delta**4 if seed == 1 else -1.0)*w[0])

    def seed_distribution(self):
        yield 1, self.p
        yield 2, 1 - self.p

    # Trial-vectorized evaluation: one entry per trial, same arithmetic as the scalar methods

    def sample_branches(self, rng: RandomSource, size: int) -> npt.NDArray[np.int64]:
        """
        Draw `size` successive branches, consuming the stream exactly like `size` calls of `sample`.
        """
        return np.where(rng.uniforms(size) < self.p, 1, 2)

    def branch_gradients(self, w: DenseVector, seeds: npt.NDArray[np.int64]) -> DenseVector:
        """
        Evaluate `G(w_i; ξ_i)` for every pair of a trial iterate and its branch.
        """
        return w / self.delta + np.where(seeds == 1, self.delta**4, -1.0)

    def full_gradients(self, w: DenseVector) -> DenseVector:
        return w / self.delta + self.delta

def make_op_delta(delta: float) -> OpDeltaProblem:
    """
    Build OP(δ).

    Raises:
        ValueError: If `delta <= 1`.
    """
    if not delta > 1:
        raise ValueError(f'OP(δ) requires δ > 1, got {delta}')

    return OpDeltaProblem(delta)

def solve_delta_for_ratio(p: float, lo: float = 1.0, tol: float = 1e-10) -> float:
    """
    Find `δ > lo` with `π(δ) = p`.

    `π` is strictly decreasing on `[1, ∞)` (its derivative has the sign of `1 - 4δ³ - 3δ⁴`), so the root is unique for
    any `lo >= 1`.

    Args:
        p: The target branch probability, in (0, 1).
        lo: The lower end of the search, on the decreasing branch of `π`.
        tol: The absolute tolerance on `δ`.

    Returns:
        The construction parameter `δ`.

    Raises:
        ValueError: If `p` is outside (0, 1) or `lo < 1`.
        ConstructionError: If no root lies above `lo`.
    """
    if not 0 < p < 1:
        raise ValueError(f'Branch probability must be in (0, 1), got {p}')
    if lo < 1:
        raise ValueError(f'Lower bracket must lie on the decreasing branch (lo >= 1), got {lo}')
    if branch_probability(lo) <= p:
        raise ConstructionError(f'π({lo:g}) = {branch_probability(lo):.6g} <= {p:.6g}: no δ > {lo:g} solves π(δ) = p')

    hi = 2*lo
    while branch_probability(hi) > p:
        hi *= 2
        if hi > MAX_DELTA:
            raise ConstructionError(f'No bracket found for π(δ) = {p:.6g} below δ = {MAX_DELTA:g}')

    delta = bisect_root(lambda d: branch_probability(d) - p, lo, hi, tol)
    logging.debug('Solved π(δ) = %.6g: δ = %.12g', p, delta)

    return delta

class ScalarQuadraticSum(FiniteSumProblem):
    """
    A finite sum of one-dimensional quadratics `f_n(w) = (q_n/2)w² + a_n w + e_n`.

    Every mini-batch loss is again a quadratic whose coefficients are the batch means, which makes the divergence
    constructions checkable coefficient by coefficient.

    Attributes:
        curvatures: The curvatures `q_n`.
        slopes: The linear coefficients `a_n`.
        offsets: The constant terms `e_n`.
        delta: The OP(δ) parameter the sum reduces to (None for generic sums).
    """
    dimension = 1

    def __init__(self, curvatures, slopes, offsets=None, batch_size: int = 1, name: str = 'scalar quadratic sum',
                 delta: float | None = None) -> None:
        self.curvatures = np.asarray(curvatures, dtype=np.float64)
        self.slopes = np.asarray(slopes, dtype=np.float64)
        self.offsets = np.zeros_like(self.slopes) if offsets is None else np.asarray(offsets, dtype=np.float64)

        if not self.curvatures.shape == self.slopes.shape == self.offsets.shape:
            raise ValueError('Curvatures, slopes and offsets must have the same length')
        if np.any(self.curvatures <= 0):
            raise ValueError('Curvatures must be positive')

        self.n_components = self.curvatures.size
        self.batch_size = batch_size
        self.name = name
        self.delta = delta

        q, a, e = self.reduced_coefficients()
        self.L = float(np.max(self.curvatures))
        self.c = float(q)
        self.w_star = np.array([-a / q])
        self.F_star = float(e - a**2 / (2*q))

    @property
    def curvature(self) -> float:
        """
        The curvature of `F` itself (both its smoothness and strong convexity constant).
        """
        return float(np.mean(self.curvatures))

    def reduced_coefficients(self, indices: npt.NDArray[np.int64] | None = None) -> tuple[float, float, float]:
        """
        Return the `(curvature, slope, offset)` coefficients of the mini-batch loss over `indices`.
        """
        if indices is None:
            return float(np.mean(self.curvatures)), float(np.mean(self.slopes)), float(np.mean(self.offsets))

        return (float(np.mean(self.curvatures[indices])), float(np.mean(self.slopes[indices])),
                float(np.mean(self.offsets[indices])))

    def batch_loss(self, w: DenseVector, indices: npt.NDArray[np.int64] | None = None) -> float:
        q, a, e = self.reduced_coefficients(indices)
        return float(q*w[0]**2 / 2 + a*w[0] + e)

    def batch_gradient(self, w: DenseVector, indices: npt.NDArray[np.int64] | None = None) -> DenseVector:
        q, a, _ = self.reduced_coefficients(indices)
        return np.array([q*w[0] + a])

    def with_slope(self, index: int, slope: float) -> 'ScalarQuadraticSum':
        """
        Return a copy of the sum with the linear coefficient of one component replaced.
        """
        problem = copy.copy(self)
        problem.slopes = self.slopes.copy()
        problem.slopes[index] = slope
        return problem

def make_thm2_problem(n_components: int, batch_size: int, lo: float = 1.0) -> ScalarQuadraticSum:
    """
    Build the fixed-batch-size construction: `N` components, batches of size `b`.

    With `δ` solving `π(δ) = b/N`, the components are `f_n(w) = w²/(2δ) - w` for `n < N` and
    `f_N(w) = w²/(2δ) + (bδ⁴ + b - 1)w`. A batch containing `N` (probability `b/N`) reduces to `w²/(2δ) + δ⁴w`, any
    other batch to `w²/(2δ) - w`: the mini-batch problem is OP(δ).

    Raises:
        ConstructionError: If `b` is not in `[1, N)` or the ratio `b/N` admits no `δ > lo`.
    """
    if not 1 <= batch_size < n_components:
        raise ConstructionError(f'batch size b={batch_size} must satisfy 1 <= b < N={n_components}')

    delta = solve_delta_for_ratio(batch_size / n_components, lo)
    slopes = np.full(n_components, -1.0)
    slopes[-1] = batch_size*delta**4 + batch_size - 1

    return ScalarQuadraticSum(
        np.full(n_components, 1 / delta), slopes,
        batch_size=batch_size,
        name=f'fixed-batch construction (N={n_components}, b={batch_size}, δ={delta:.6g})',
        delta=delta,
    )

def make_thm3_problem(n_components: int, lo: float = 1.0) -> ScalarQuadraticSum:
    """
    Build the large-batch construction: `N` components, batches of size `b = N-1`.

    With `δ` solving `π(δ) = 1/N`, the components are `f_n(w) = w²/(2δ) + δ⁴w` for `n < N` and
    `f_N(w) = w²/(2δ) - ((N-1) + (N-2)δ⁴)w`. The batch missing `N` (probability `1/N`) reduces to
    `w²/(2δ) + δ⁴w`, every other batch to `w²/(2δ) - w`.

    Raises:
        ConstructionError: If `N < 2` or `1/N` admits no `δ > lo`.
    """
    if n_components < 2:
        raise ConstructionError(f'N={n_components} must be at least 2')

    delta = solve_delta_for_ratio(1 / n_components, lo)
    slopes = np.full(n_components, delta**4)
    slopes[-1] = -((n_components - 1) + (n_components - 2)*delta**4)

    return ScalarQuadraticSum(
        np.full(n_components, 1 / delta), slopes,
        batch_size=n_components - 1,
        name=f'large-batch construction (N={n_components}, b=N-1, δ={delta:.6g})',
        delta=delta,
    )
