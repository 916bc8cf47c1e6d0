"""
SPDX-License-Identifier: MIT

Grid-search training comparisons between VRADAM and ADAM under an equal compute budget.

Budgets are expressed in model cost units (one mini-batch gradient = 1 unit, one full gradient = `N/b` units), which
keeps comparisons machine-independent. Every grid cell is run over several seeds; cells are compared through their
mean loss curve and the spread of their final loss.
"""

import itertools
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from vradam.exceptions import TimeRangeError
from vradam.experiments.harness import OptimizerSpec, run_trials
from vradam.numerics import RandomSource, check_finite
from vradam.optimizers.schedules import LearningRateSchedule
from vradam.optimizers.state import AdamHyper, RunRecord
from vradam.problems.base import FiniteSumProblem

TIME_AXES = ('cost', 'wall_clock')

RelativePair = tuple['CellResult', 'CellResult', npt.NDArray[np.float64], npt.NDArray[np.float64]]

@dataclass(frozen=True)
class TrainingCurve:
    """
    The compact per-step series of one training run.

    Attributes:
        cost: The cumulative model cost units.
        wall_clock: The cumulative measured time in seconds.
        loss: `F` at each iterate.
        grad_norm: `‖∇F‖₂` at each iterate.
        epoch_scale: The number of cost units in one pass over the data (`N/b`).
    """
    cost: npt.NDArray[np.float64]
    wall_clock: npt.NDArray[np.float64]
    loss: npt.NDArray[np.float64]
    grad_norm: npt.NDArray[np.float64]
    epoch_scale: float

    @classmethod
    def from_record(cls, record: RunRecord, problem: FiniteSumProblem) -> 'TrainingCurve':
        n = record.steps
        return cls(record.cost[:n].copy(), record.wall_clock[:n].copy(), record.loss[:n].copy(),
                   record.grad_norm[:n].copy(), problem.full_gradient_cost)

    @property
    def epochs(self) -> npt.NDArray[np.float64]:
        return self.cost / self.epoch_scale

    @property
    def final_loss(self) -> float:
        return float(self.loss[-1])

    def axis(self, time_axis: str) -> npt.NDArray[np.float64]:
        if time_axis not in TIME_AXES:
            raise ValueError(f'Unknown time axis "{time_axis}": must be one of {TIME_AXES}')

        return self.cost if time_axis == 'cost' else self.wall_clock

@dataclass
class CellResult:
    """
    The runs of one grid cell, one curve per seed.

    Attributes:
        optimizer: The optimizer of the cell.
        curves: The training curves, in seed order.
        failed: The number of failed seeds.
    """
    optimizer: OptimizerSpec
    curves: list[TrainingCurve]
    failed: int = 0

    @property
    def final_losses(self) -> npt.NDArray[np.float64]:
        return np.array([curve.final_loss for curve in self.curves])

    @property
    def mean_final_loss(self) -> float:
        return float(np.mean(self.final_losses)) if self.curves else float('inf')

    @property
    def min_final_loss(self) -> float:
        return float(np.min(self.final_losses))

    @property
    def max_final_loss(self) -> float:
        return float(np.max(self.final_losses))

    def mean_curve(self) -> TrainingCurve:
        """
        Average the seeds step by step (costs do not depend on the seed; measured times are averaged too).
        """
        if not self.curves:
            raise ValueError(f'Every seed of {self.optimizer.label} failed')

        first = self.curves[0]
        return TrainingCurve(
            first.cost,
            np.mean([curve.wall_clock for curve in self.curves], axis=0),
            np.mean([curve.loss for curve in self.curves], axis=0),
            np.mean([curve.grad_norm for curve in self.curves], axis=0),
            first.epoch_scale,
        )

def relative_difference(times_a, values_a, times_b, values_b,
                        points: int | None = None) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """
    Return `(a - b)/|b|` on a common time axis, both series being linearly interpolated in time.

    Args:
        times_a: The (increasing) time axis of series `a`.
        values_a: The values of series `a`.
        times_b: The (increasing) time axis of series `b`.
        values_b: The values of series `b`.
        points: The number of points of the common axis (the longer series' length when None).

    Returns:
        The common axis, spanning the overlap of both time ranges, and the relative differences.

    Raises:
        TimeRangeError: If the time ranges do not overlap.
        EvaluationError: If `b` vanishes on the common axis.
    """
    times_a, values_a = np.asarray(times_a, dtype=np.float64), np.asarray(values_a, dtype=np.float64)
    times_b, values_b = np.asarray(times_b, dtype=np.float64), np.asarray(values_b, dtype=np.float64)
    if times_a.size == 0 or times_b.size == 0:
        raise ValueError('Both series need at least one point')

    lo, hi = max(times_a[0], times_b[0]), min(times_a[-1], times_b[-1])
    if lo > hi or (lo == hi and (times_a.size > 1 or times_b.size > 1)):
        raise TimeRangeError((float(times_a[0]), float(times_a[-1])), (float(times_b[0]), float(times_b[-1])))

    axis = np.linspace(lo, hi, points or max(times_a.size, times_b.size))
    a = np.interp(axis, times_a, values_a)
    b = np.interp(axis, times_b, values_b)

    relative = (a - b) / np.abs(b)
    check_finite(relative, 'relative difference')

    return axis, relative

def steps_for_budget(optimizer: OptimizerSpec, problem: FiniteSumProblem, budget: float) -> int:
    """
    Return the step budget matching `budget` model cost units.

    ADAM and SGD spend one unit per step. A VRADAM outer iteration spends `N/b` units on its full gradient and two per
    inner step, and whole outer iterations only are run (at least one).
    """
    if not budget > 0:
        raise ValueError(f'Budget must be positive, got {budget}')

    if optimizer.algorithm != 'vradam':
        return max(1, int(budget))

    per_outer = problem.full_gradient_cost + 2*optimizer.inner_length
    return max(1, int(budget // per_outer)) * optimizer.inner_length

def make_grid(algorithms: Iterable[str], schedules: Sequence[LearningRateSchedule], inner_lengths: Sequence[int], #pylint: disable=too-many-arguments
              options: Sequence[str] = ('A',), batch_size: int = 1, beta1: float = 0.9, beta2: float = 0.999,
              epsilon: float = 1e-8, bias_correction: bool = False) -> list[OptimizerSpec]:
    """
    Enumerate the grid cells: every schedule for ADAM, every (schedule, option, `m`) combination for VRADAM.
    """
    cells = []
    for algorithm in algorithms:
        for schedule in schedules:
            hyper = AdamHyper(schedule, beta1, beta2, epsilon, bias_correction and algorithm == 'adam')
            if algorithm == 'vradam':
                cells.extend(OptimizerSpec(algorithm, hyper, m, batch_size, option)
                             for option, m in itertools.product(options, inner_lengths))
            else:
                cells.append(OptimizerSpec(algorithm, hyper, batch_size=batch_size))

    return cells

def train_grid(problem: FiniteSumProblem, cells: Sequence[OptimizerSpec], budget: float, seeds: int = 3, #pylint: disable=too-many-arguments
               base_seed: int = 0, w0=None, workers: int = 8) -> list[CellResult]:
    """
    Train every grid cell over `seeds` seeds under the same budget of model cost units.

    Seed `i` uses the random stream `i` of `base_seed` in every cell, so cells differ by their optimizer only.

    Returns:
        One result per cell, in grid order.
    """
    if seeds < 1:
        raise ValueError(f'Need at least one seed, got {seeds}')

    results = []
    for n, optimizer in enumerate(cells, start=1):
        steps = steps_for_budget(optimizer, problem, budget)

        def _trial(rng: RandomSource, optimizer=optimizer, steps=steps) -> TrainingCurve:
            start = problem.initial_point(rng.spawn(rng.stream_id + seeds)) if w0 is None else w0
            return TrainingCurve.from_record(optimizer.run(problem, start, steps, rng), problem)

        logging.info('[%i/%i] Training %s for %i steps (%g cost units)...', n, len(cells), optimizer.label, steps,
                     budget)
        trials = run_trials(_trial, seeds, base_seed, workers)
        result = CellResult(optimizer, trials.outcomes, trials.failed)
        if result.curves:
            logging.info('[%i/%i] %s: final loss %.6g (min %.6g, max %.6g) [SUCCESS]', n, len(cells), optimizer.label,
                         result.mean_final_loss, result.min_final_loss, result.max_final_loss)
        results.append(result)

    return results

def best_cell(results: Sequence[CellResult], algorithm: str, option: str | None = None) -> CellResult:
    """
    Return the cell of `algorithm` (and VRADAM `option`) with the lowest mean final loss.

    Raises:
        ValueError: If no cell matches.
    """
    matching = [
        result for result in results
        if result.optimizer.algorithm == algorithm and (option is None or result.optimizer.option == option)
        and result.curves
    ]
    if not matching:
        raise ValueError(f'No successful grid cell for {algorithm}' + (f' (option {option})' if option else ''))

    return min(matching, key=lambda result: result.mean_final_loss)

def relative_pairs(results: Sequence[CellResult], time_axis: str = 'cost') -> list[RelativePair]:
    """
    Pair every VRADAM cell with the ADAM cell sharing its schedule and compute their relative loss difference.

    Pairs whose time ranges do not overlap (a VRADAM budget smaller than one outer iteration) are skipped.

    Returns:
        `(vradam, adam, axis, relative)` tuples, in grid order.
    """
    adam = {result.optimizer.hyper.schedule: result for result in results
            if result.optimizer.algorithm == 'adam' and result.curves}

    pairs = []
    for result in results:
        if result.optimizer.algorithm != 'vradam' or not result.curves:
            continue
        reference = adam.get(result.optimizer.hyper.schedule)
        if reference is None:
            continue

        a, b = result.mean_curve(), reference.mean_curve()
        try:
            axis, relative = relative_difference(a.axis(time_axis), a.loss, b.axis(time_axis), b.loss)
        except TimeRangeError as error:
            logging.warning('Skipping %s against %s: %s', result.optimizer.label, reference.optimizer.label, error)
            continue
        pairs.append((result, reference, axis, relative))

    return pairs
