"""
SPDX-License-Identifier: MIT

Problem-level oracles: exact expectations by batch enumeration, construction equivalence and finite-difference audits.

None of them runs an optimizer, so they validate the problems before any optimizer result is trusted.
"""

import logging
import math

import numpy as np

from vradam.exceptions import EnumerationSizeError
from vradam.numerics import DenseVector, RandomSource, as_vector, finite_difference_gradient
from vradam.problems.base import FiniteSumProblem, StochasticProblem
from vradam.problems.constructions import ScalarQuadraticSum, branch_probability, op_branches
from vradam.verify.reports import OracleReport

ENUMERATION_CAP = 10**6

def _seed_count(problem: StochasticProblem) -> int | None:
    if isinstance(problem, FiniteSumProblem):
        return math.comb(problem.n_components, problem.batch_size)

    return None

def enumerate_batches_expectation(problem: StochasticProblem, w, batch_size: int | None = None) -> DenseVector:
    """
    Return the exact expectation of the gradient estimator at `w`, averaging over every seed with its probability.

    For a finite sum this is the average of `∇F^B(w)` over all `C(N, b)` mini-batches.

    Args:
        problem: A problem with a finite seed distribution.
        w: The point of evaluation.
        batch_size: Override the mini-batch size of a finite sum.

    Raises:
        EnumerationSizeError: If there are more than 10⁶ seeds (the oracle never subsamples).
    """
    if batch_size is not None:
        if not isinstance(problem, FiniteSumProblem):
            raise ValueError(f'{problem.name} is not a finite sum: cannot change its batch size')
        problem = problem.with_batch_size(batch_size)

    count = _seed_count(problem)
    if count is not None and count > ENUMERATION_CAP:
        raise EnumerationSizeError(count, ENUMERATION_CAP)

    w = as_vector(w, 'enumeration point')
    expectation = np.zeros(problem.dimension)
    for seed, probability in problem.seed_distribution():
        expectation += probability * problem.estimate(w, seed)

    return expectation

def check_unbiasedness(problem: StochasticProblem, rng: RandomSource, points: int = 50, scale: float = 1.0,
                       tol: float = 1e-12) -> OracleReport:
    """
    Compare the enumerated expectation of the estimator with the full gradient at random points.

    The violation is `‖𝔼[G] - ∇F‖∞ / max(1, ‖∇F‖∞)`.
    """
    worst, worst_point = 0.0, None
    for _ in range(points):
        w = scale * rng.normal(problem.dimension)
        full = problem.full_gradient(w)
        error = float(np.max(np.abs(enumerate_batches_expectation(problem, w) - full)) / max(1.0, np.max(np.abs(full))))
        if error > worst or worst_point is None:
            worst, worst_point = error, w

    return OracleReport('unbiasedness', problem.name, worst, tol, f'worst point {np.array2string(worst_point, 6)}')

def check_construction_equivalence(problem: ScalarQuadraticSum, delta_expected: float, #pylint: disable=too-many-locals
                                   rng: RandomSource | None = None, points: int = 100, radius: float = 1e3,
                                   tol: float = 1e-10) -> OracleReport:
    """
    Check that a finite-sum construction is OP(`delta_expected`) in disguise.

    Every mini-batch loss must equal one of the two OP(δ) branch losses at `points` random `w` in `[-radius, radius]`
    (relative error `|Δ|/max(1, |branch|)`), and the enumerated probability of the large-gradient branch must equal
    `π(δ)`.

    Returns:
        A failing report names the first offending batch.
    """
    rng = rng or RandomSource(0)
    ws = radius * (2*rng.uniforms(points) - 1)

    branches = [q*ws**2/2 + a*ws for q, a in op_branches(delta_expected)]
    count = _seed_count(problem)
    if count is not None and count > ENUMERATION_CAP:
        raise EnumerationSizeError(count, ENUMERATION_CAP)

    worst, offending, first_branch = 0.0, None, 0.0
    for batch, probability in problem.seed_distribution():
        values = np.array([problem.seed_loss(np.array([w]), batch) for w in ws])
        errors = [float(np.max(np.abs(values - branch) / np.maximum(1.0, np.abs(branch)))) for branch in branches]
        matched = int(np.argmin(errors))

        if errors[matched] > tol and offending is None:
            offending = batch
        worst = max(worst, errors[matched])
        if matched == 0:
            first_branch += probability

    frequency_error = abs(first_branch - branch_probability(delta_expected))
    delta_error = 0.0 if problem.delta is None else abs(problem.delta - delta_expected) / max(1.0, delta_expected)

    details = f'large-branch frequency {first_branch:.12g} (π(δ) = {branch_probability(delta_expected):.12g})'
    if offending is not None:
        details += f'; first offending batch {offending.tolist()}'

    report = OracleReport('construction', problem.name, max(worst, frequency_error, delta_error), tol, details)
    logging.debug('Construction equivalence on %s: %s', problem.name, 'passed' if report.passed else details)

    return report

def audit_gradients(problem: StochasticProblem, points: int, h: float, rng: RandomSource, tol: float = 1e-5,
                    scale: float = 1.0) -> OracleReport:
    """
    Compare the analytic full gradient with central finite differences of the loss at random points.

    The points are the problem's default starting point perturbed by `scale` times a standard normal vector. The
    violation is `‖∇F - ∇F_fd‖∞ / max(1, ‖∇F‖∞)`.

    Raises:
        ValueError: If `points < 1`.
    """
    if points < 1:
        raise ValueError(f'Need at least one point, got {points}')

    base = problem.initial_point(rng)
    worst = 0.0
    for _ in range(points):
        w = base + scale*rng.normal(problem.dimension)
        analytic = problem.full_gradient(w)
        numeric = finite_difference_gradient(problem.loss, w, h)
        worst = max(worst, float(np.max(np.abs(analytic - numeric)) / max(1.0, np.max(np.abs(analytic)))))

    return OracleReport('gradient-audit', problem.name, worst, tol, f'{points} points, h={h:g}')
