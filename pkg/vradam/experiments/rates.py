"""
SPDX-License-Identifier: MIT

Convergence-rate checks for VRADAM with resetting.

On a `c`-strongly convex problem whose component gradients are bounded by `G`, with `α_t = α/t` and
`C₂ = 2c(1-β₁)/√(9G²+ε)` satisfying `C₂·m·α < 1`, the optimality gap of the snapshots decays as `O(T^(-C₂·m·α))`. The
check calibrates the constant on the first outer iterations and asserts the bound on the remaining ones. The gradient
norm monitors of the non-convex case are reported alongside, never gated.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from vradam.exceptions import ConfigurationError
from vradam.numerics import RandomSource, SeriesStats
from vradam.optimizers.schedules import LearningRateSchedule
from vradam.optimizers.state import RunRecord, VradamConfig
from vradam.optimizers.variance_reduced import run_vradam
from vradam.problems.base import StochasticProblem

@dataclass(frozen=True)
class RateCheck: #pylint: disable=too-many-instance-attributes
    """
    The outcome of a rate check.

    Attributes:
        c2: The rate constant `C₂ = 2c(1-β₁)/√(9G²+ε)`.
        exponent: The decay exponent `C₂·m·α`.
        calibration: The calibrated constant `C`.
        fitted_slope: The least-squares slope of `log(gap)` against `log(T)`.
        gaps: `F(w̃_T) - F*` for `T = 1..T_outer+1`.
        bound: `C·T^(-C₂·m·α)` on the same axis.
        violations: The outer iterations where the gap exceeds the bound.
        calibration_range: The `(first, last)` outer iterations used for calibration.
    """
    c2: float
    exponent: float
    calibration: float
    fitted_slope: float
    gaps: npt.NDArray[np.float64]
    bound: npt.NDArray[np.float64]
    violations: list[int]
    calibration_range: tuple[int, int]

    @property
    def passed(self) -> bool:
        return not self.violations

    def gap_at(self, outer: int) -> float:
        return float(self.gaps[outer - 1])

@dataclass(frozen=True)
class GradientNormSeries:
    """
    Per outer iteration statistics of `‖∇F(w̃_t)‖₂` across trials.

    Attributes:
        mean: The across-trial mean.
        variance: The across-trial variance (expected to approach zero).
        min_so_far: The across-trial mean of the smallest norm seen up to each outer iteration.
    """
    mean: npt.NDArray[np.float64]
    variance: npt.NDArray[np.float64]
    min_so_far: npt.NDArray[np.float64]

    @property
    def decreasing(self) -> bool:
        """
        Whether the min-so-far norm ends strictly below where it started (a monitor, not a gate).
        """
        return bool(self.min_so_far[-1] < self.min_so_far[0])

def rate_constant(c: float, beta1: float, G: float, epsilon: float) -> float:
    """
    Return `C₂ = 2c(1-β₁)/√(9G²+ε)`.
    """
    return 2*c*(1 - beta1) / np.sqrt(9*G**2 + epsilon)

def rate_check(problem: StochasticProblem, cfg: VradamConfig, T_outer: int, rng: RandomSource, #pylint: disable=too-many-arguments, too-many-locals
               w0=None, calibration: tuple[int, int] = (2, 10)) -> RateCheck:
    """
    Run VRADAM with Option A and check `F(w̃_T) - F* <= C·T^(-C₂·m·α)` past the calibration window.

    Args:
        problem: A problem declaring `c`, `G_bound` and `F_star`.
        cfg: A VRADAM configuration with an `inv_t` schedule and Option A.
        T_outer: The number of outer iterations (past the calibration window).
        rng: The random source of the run.
        w0: The starting snapshot (the problem's default when None).
        calibration: The `(first, last)` outer iterations on which `C` is calibrated.

    Raises:
        ConfigurationError: If a hypothesis of the rate does not hold (no run is made).
    """
    if problem.c is None or problem.G_bound is None or problem.F_star is None:
        raise ConfigurationError(f'{problem.name} must declare its strong convexity c, gradient bound G and F*')
    schedule = cfg.hyper.schedule
    if not isinstance(schedule, LearningRateSchedule) or schedule.kind != 'inv_t':
        raise ConfigurationError('the learning rate must follow α_t = α/t')
    if cfg.option != 'A':
        raise ConfigurationError('the rate holds for Option A (resetting) only')

    c2 = rate_constant(problem.c, cfg.hyper.beta1, problem.G_bound, cfg.hyper.epsilon)
    exponent = c2*cfg.inner_length*schedule.alpha0
    if exponent >= 1:
        raise ConfigurationError(f'C₂ = {c2:.6g} must be below 1/(α·m) = {1/(schedule.alpha0*cfg.inner_length):.6g} '
                                 f'(C₂·m·α = {exponent:.6g} >= 1)')

    first, last = calibration
    if T_outer <= last:
        raise ValueError(f'Need more than {last} outer iterations past the calibration window, got {T_outer}')

    record = run_vradam(problem, cfg, problem.initial_point() if w0 is None else w0, T_outer, rng)
    gaps = np.array(record.snapshot_loss + [problem.loss(record.final)]) - problem.F_star
    outer = np.arange(1, gaps.size + 1, dtype=np.float64)

    calibration_constant = float(np.max(gaps[first - 1:last] * outer[first - 1:last]**exponent))
    bound = calibration_constant * outer**(-exponent)
    checked = np.arange(last + 1, T_outer + 1)
    violations = [int(T) for T in checked if gaps[T - 1] > bound[T - 1]]

    positive = gaps[first - 1:T_outer] > 0
    fitted_slope = float('nan')
    if np.count_nonzero(positive) >= 2:
        fitted_slope = float(np.polyfit(np.log(outer[first - 1:T_outer][positive]),
                                        np.log(gaps[first - 1:T_outer][positive]), 1)[0])

    logging.info('Rate check on %s: C₂·m·α=%.4g, C=%.4g, fitted slope %.4g, %i violations', problem.name, exponent,
                 calibration_constant, fitted_slope, len(violations))

    return RateCheck(c2, exponent, calibration_constant, fitted_slope, gaps, bound, violations, calibration)

def gradient_norm_series(records: Sequence[RunRecord]) -> GradientNormSeries:
    """
    Track `‖∇F(w̃_t)‖₂` across VRADAM trials: its mean, its across-trial variance and the min-so-far norm.

    Raises:
        ValueError: If no record is given or the records have different numbers of outer iterations.
    """
    if not records:
        raise ValueError('Need at least one record')

    norms = [np.array(record.snapshot_grad_norm) for record in records]
    if len({series.size for series in norms}) != 1:
        raise ValueError('Records must have the same number of outer iterations')

    by_outer = SeriesStats.from_values(norms)
    min_so_far = SeriesStats.from_values(np.minimum.accumulate(series) for series in norms)

    return GradientNormSeries(np.asarray(by_outer.mean), np.asarray(by_outer.variance), np.asarray(min_so_far.mean))
