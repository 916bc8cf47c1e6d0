"""
SPDX-License-Identifier: MIT

Tracks the variance of the VRADAM direction along a recorded run.

At a recorded inner step the iterate `w_k` and the snapshot `w̃` are frozen and fresh mini-batches are redrawn: the
sample variance of the direction is compared with `L²‖w_k - w̃‖²`, which bounds it for problems with `L`-Lipschitz
component gradients. The variance therefore shrinks as the inner iterates and the snapshot converge together.
"""

import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from vradam.exceptions import ReplayError
from vradam.numerics import RandomSource
from vradam.optimizers.state import RunRecord
from vradam.optimizers.variance_reduced import vradam_inner_direction
from vradam.problems.base import StochasticProblem

REPLAY_TOLERANCE = 1e-12

@dataclass(frozen=True)
class VarianceSeries:
    """
    Direction variance at the recorded steps of a run.

    Attributes:
        locations: The `(t, k)` location of each recorded step.
        lambda_hat: The largest per-coordinate sample variance of the direction.
        stderr: The standard error of `lambda_hat`.
        bound: `L²‖w_k - w̃‖²`.
        resamples: The number of mini-batches drawn at each step.
    """
    locations: npt.NDArray[np.int64]
    lambda_hat: npt.NDArray[np.float64]
    stderr: npt.NDArray[np.float64]
    bound: npt.NDArray[np.float64]
    resamples: int

    def violations(self, z: float = 3.0) -> list[int]:
        """
        Return the indices where `lambda_hat` exceeds the bound by more than `z` standard errors.
        """
        return [int(i) for i in np.flatnonzero(self.lambda_hat > self.bound + z*self.stderr)]

    @property
    def passed(self) -> bool:
        return not self.violations()

def _variance_with_stderr(samples: npt.NDArray[np.float64]) -> tuple[float, float]:
    # shifting by the first sample keeps identical samples at exactly zero variance
    shifted = samples - samples[0]
    variances = np.var(shifted, axis=0, ddof=1)
    i = int(np.argmax(variances))

    deviations = (shifted[:, i] - shifted[:, i].mean())**2
    stderr = float(np.std(deviations, ddof=1) / np.sqrt(samples.shape[0]))

    return float(variances[i]), stderr

def variance_track(problem: StochasticProblem, run: RunRecord, rng: RandomSource, #pylint: disable=too-many-locals
                   resamples: int = 200, every: int = 1) -> VarianceSeries:
    """
    Estimate the direction variance at every `every`-th step of a VRADAM run.

    Args:
        problem: The problem the run was made on (must declare `L`).
        run: A VRADAM record.
        rng: The random source of the resampled mini-batches.
        resamples: The number of mini-batches drawn per step (at least 30).
        every: The stride between tracked steps.

    Raises:
        ValueError: If `resamples < 30`, `every < 1`, `L` is unknown or the record has no snapshot.
        ReplayError: If a recorded direction cannot be reproduced from its recorded seed.
    """
    if resamples < 30:
        raise ValueError(f'Need at least 30 resamples, got {resamples}')
    if every < 1:
        raise ValueError(f'Stride must be at least 1, got {every}')
    if problem.L is None:
        raise ValueError(f'{problem.name} does not declare its smoothness constant L')
    if not run.snapshots:
        raise ValueError(f'Record "{run.algorithm}" holds no snapshot: not a VRADAM run')

    steps = range(0, run.steps, every)
    lambda_hat, stderr, bound = np.empty(len(steps)), np.empty(len(steps)), np.empty(len(steps))
    full_gradients = {}

    for j, i in enumerate(steps):
        t, k = (int(x) for x in run.locations[i])
        w_k, w_tilde = run.point_before(i), run.snapshots[t - 1]
        if t not in full_gradients:
            full_gradients[t] = problem.full_gradient(w_tilde)

        replayed = vradam_inner_direction(w_k, w_tilde, run.seeds[i], problem, full_gradients[t])
        deviation = float(np.max(np.abs(replayed - run.directions[i])))
        if deviation > REPLAY_TOLERANCE * max(1.0, float(np.max(np.abs(run.directions[i])))):
            raise ReplayError(t, k, deviation)

        samples = np.vstack([
            vradam_inner_direction(w_k, w_tilde, problem.sample(rng), problem, full_gradients[t])
            for _ in range(resamples)
        ])
        lambda_hat[j], stderr[j] = _variance_with_stderr(samples)
        bound[j] = problem.L**2 * float(np.sum((w_k - w_tilde)**2))

    series = VarianceSeries(run.locations[list(steps)].copy(), lambda_hat, stderr, bound, resamples)
    logging.info('Tracked the direction variance at %i steps of %s (%i resamples): %i violations', len(steps),
                 run.algorithm, resamples, len(series.violations()))

    return series
