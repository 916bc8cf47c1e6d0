"""
SPDX-License-Identifier: MIT

Divergence statistics: the expected squared distance to the optimum `𝔼[(w_t - w*)²]` and the expected signed update
`𝔼[Δ_t]` of an optimizer started on OP(δ) (or on one of its finite-sum recasts), estimated over seeded trials.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy import stats

from vradam.experiments.harness import ExperimentSpec, OptimizerSpec, run_experiment
from vradam.numerics import RandomSource, SeriesStats
from vradam.optimizers.state import RunRecord
from vradam.optimizers.variance_reduced import bias_correct
from vradam.problems.base import StochasticProblem
from vradam.problems.constructions import OpDeltaProblem, make_op_delta

# Branches drawn per trial stream at once by the vectorized path
DRAW_CHUNK = 1024

@dataclass(frozen=True)
class Trajectory:
    """
    The compact per-trial series kept by a divergence experiment.

    Attributes:
        sq_error: `(w_t - w*)²` (first coordinate) for `t = 0..T`, `t = 0` being the starting point.
        updates: The signed updates `Δ_t` (first coordinate) for `t = 1..T`.
    """
    sq_error: npt.NDArray[np.float64]
    updates: npt.NDArray[np.float64]

@dataclass
class DivergenceSeries: #pylint: disable=too-many-instance-attributes
    """
    Monte-Carlo estimates of a divergence experiment, per step.

    Attributes:
        label: The optimizer label.
        w_star: The optimum.
        t: The step axis `0..T`.
        mse_mean: The mean of `(w_t - w*)²`.
        mse_stderr: Its standard error.
        drift_mean: The mean signed update (0 at `t = 0`).
        drift_stderr: Its standard error.
        updates: The `trials x T` matrix of signed updates (input of `drift_estimate`).
        trials: The number of successful trials.
        failed: The number of failed trials.
    """
    label: str
    w_star: float
    t: npt.NDArray[np.int64]
    mse_mean: npt.NDArray[np.float64]
    mse_stderr: npt.NDArray[np.float64]
    drift_mean: npt.NDArray[np.float64]
    drift_stderr: npt.NDArray[np.float64]
    updates: npt.NDArray[np.float64]
    trials: int
    failed: int

    @property
    def initial_mse(self) -> float:
        return float(self.mse_mean[0])

    @property
    def final_mse(self) -> float:
        return float(self.mse_mean[-1])

    def mse_at(self, step: int) -> float:
        return float(self.mse_mean[min(step, self.t.size - 1)])

@dataclass(frozen=True)
class DriftEstimate:
    """
    The mean signed update past a warm-up window, with a normal-approximation confidence interval.

    Attributes:
        mean: The estimated drift.
        stderr: Its standard error.
        low: The lower end of the interval.
        high: The upper end of the interval.
        confidence: The confidence level.
        warmup: The number of discarded leading steps.
        samples: The number of independent samples behind the estimate.
    """
    mean: float
    stderr: float
    low: float
    high: float
    confidence: float
    warmup: int
    samples: int

    @property
    def positive(self) -> bool:
        """
        Whether the whole interval lies strictly above zero.
        """
        return self.low > 0

def _signed_updates(item: RunRecord | npt.ArrayLike) -> npt.NDArray[np.float64]:
    if isinstance(item, RunRecord):
        return item.updates[:item.steps, 0]

    return np.asarray(item, dtype=np.float64).reshape(-1)

def drift_estimate(records: Sequence[RunRecord | npt.ArrayLike], warmup: int = 1000,
                   confidence: float = 0.99) -> DriftEstimate:
    """
    Estimate the drift `𝔼[Δ_t]` past `warmup` steps.

    With several trials, each trial contributes the mean of its window and the interval is taken across trials
    (independent samples). A single trial falls back to the pooled window.

    Args:
        records: Run records, or per-trial series of signed scalar updates.
        warmup: The number of leading steps discarded.
        confidence: The two-sided confidence level.

    Raises:
        ValueError: If the window past `warmup` is empty.
    """
    windows = [_signed_updates(item)[warmup:] for item in records]
    if not windows or any(window.size == 0 for window in windows):
        raise ValueError(f'Empty drift window: warm-up {warmup} covers a whole run')

    samples = np.array([window.mean() for window in windows]) if len(windows) > 1 else windows[0]
    mean = float(np.mean(samples))
    stderr = float(np.std(samples, ddof=1) / np.sqrt(samples.size)) if samples.size > 1 else 0.0
    half_width = float(stats.norm.ppf(0.5 + confidence/2)) * stderr

    return DriftEstimate(mean, stderr, mean - half_width, mean + half_width, confidence, warmup, samples.size)

def _vectorized_paths(problem: OpDeltaProblem, optimizer: OptimizerSpec, w0: float, trials: int, #pylint: disable=too-many-arguments, too-many-locals
                      steps: int, base_seed: int, shared_stream: bool) -> tuple[npt.NDArray, npt.NDArray]:
    """
    Run every trial of OP(δ) at once, one array entry per trial.

    Each trial consumes its own stream in the same order as the scalar optimizers and every update is computed with
    the same expressions, so a row is identical to the iterates of the corresponding sequential run.

    Returns:
        The `trials x (steps+1)` iterates (starting point first) and the `trials x steps` signed updates.
    """
    hyper = optimizer.hyper
    sources = [RandomSource(base_seed, 0 if shared_stream else trial) for trial in range(trials)]
    paths = np.empty((trials, steps + 1))
    updates = np.empty((trials, steps))
    paths[:, 0] = w0

    w = paths[:, 0].copy()
    m, v = np.zeros(trials), np.zeros(trials)
    w_tilde = full = None
    branches = None

    with np.errstate(over='ignore', invalid='ignore', divide='ignore'):
        for step in range(steps):
            offset = step % DRAW_CHUNK
            if offset == 0:
                size = min(DRAW_CHUNK, steps - step)
                branches = np.vstack([problem.sample_branches(source, size) for source in sources])
            seeds = branches[:, offset]

            if optimizer.algorithm == 'sgd':
                update = -hyper.schedule(step + 1)*problem.branch_gradients(w, seeds)
            elif optimizer.algorithm == 'adam':
                t = step + 1
                g = problem.branch_gradients(w, seeds)
                m = hyper.beta1*m + (1 - hyper.beta1)*g
                v = hyper.beta2*v + (1 - hyper.beta2)*g*g
                m_hat, v_hat = m, v
                if hyper.bias_correction:
                    m_hat = m / (1 - hyper.beta1**t)
                    v_hat = v / (1 - hyper.beta2**t)
                update = -hyper.schedule(t) * m_hat / np.sqrt(v_hat + hyper.epsilon)
            else:
                t, k = divmod(step, optimizer.inner_length)
                t, k = t + 1, k + 1
                if k == 1:
                    w_tilde, full = w, problem.full_gradients(w)
                    if optimizer.option == 'A':
                        m, v = np.zeros(trials), np.zeros(trials)

                g = problem.branch_gradients(w, seeds) - problem.branch_gradients(w_tilde, seeds) + full
                m = hyper.beta1*m + (1 - hyper.beta1)*g
                v = hyper.beta2*v + (1 - hyper.beta2)*g*g
                m_tilde, v_tilde = bias_correct(m, v, k, t, optimizer.inner_length, optimizer.option, hyper.beta1,
                                                hyper.beta2)
                update = -hyper.schedule(t) * m_tilde / np.sqrt(v_tilde + hyper.epsilon)

            w = w + update
            updates[:, step] = update
            paths[:, step + 1] = w

    return paths, updates

def divergence_experiment(delta: float, w0: float, trials: int, steps: int, #pylint: disable=too-many-arguments, too-many-locals
                          base_seed: int, optimizer: OptimizerSpec, problem: StochasticProblem | None = None,
                          workers: int = 8, shared_stream: bool = False, vectorize: bool = True) -> DivergenceSeries:
    """
    Estimate `𝔼[(w_t - w*)²]` and `𝔼[Δ_t]` for `t = 0..steps` over seeded trials.

    Args:
        delta: The OP(δ) parameter (ignored when `problem` is given).
        w0: The (scalar) starting point.
        trials: The number of trials (at least 2).
        steps: The step budget of each trial.
        base_seed: The base seed.
        optimizer: The optimizer run by every trial.
        problem: A one-dimensional problem replacing OP(δ), e.g. a finite-sum construction.
        workers: The size of the worker pool.
        shared_stream: Run every trial on the same random stream.
        vectorize: Run the trials of OP(δ) itself as one array per step instead of on the worker pool (same
            iterates, one process). Other problems always go through the pool.

    Raises:
        ValueError: If `trials < 2` or the problem is not one-dimensional with a known optimum.
    """
    if trials < 2:
        raise ValueError(f'A divergence experiment needs at least 2 trials, got {trials}')

    problem = problem or make_op_delta(delta)
    if problem.dimension != 1 or problem.w_star is None:
        raise ValueError(f'{problem.name} is not a one-dimensional problem with a known optimum')

    w_star = float(problem.w_star[0])

    def _reduce(record: RunRecord) -> Trajectory:
        path = np.concatenate([record.initial[:1], record.iterates[:record.steps, 0]])
        return Trajectory((path - w_star)**2, record.updates[:record.steps, 0].copy())

    spec = ExperimentSpec(f'divergence δ={delta:g} w0={w0:g}', problem, optimizer, trials, steps, np.array([w0]),
                          base_seed, workers, shared_stream)

    if vectorize and isinstance(problem, OpDeltaProblem):
        paths, updates = _vectorized_paths(problem, optimizer, float(w0), trials, steps, base_seed, shared_stream)
        finite = np.isfinite(paths).all(axis=1) & np.isfinite(updates).all(axis=1)
        failed = int(trials - finite.sum())
        if failed:
            logging.warning('%i/%i trials of "%s" left the floating-point range', failed, trials, spec.name)
            sq_error, updates = (paths[finite] - w_star)**2, updates[finite]
        else:
            sq_error = np.square(np.subtract(paths, w_star, out=paths), out=paths)
    else:
        results = run_experiment(spec, _reduce)
        failed = results.failed
        sq_error = [outcome.sq_error for outcome in results.outcomes]
        updates = np.vstack([outcome.updates for outcome in results.outcomes]) if results.outcomes else np.empty((0,))

    if len(sq_error) == 0:
        raise ValueError(f'Every trial of "{spec.name}" failed')

    mse = SeriesStats.from_values(sq_error)
    drift = SeriesStats.from_values(updates)

    series = DivergenceSeries(
        label=optimizer.label,
        w_star=w_star,
        t=np.arange(mse.mean.size),
        mse_mean=mse.mean,
        mse_stderr=mse.stderr,
        drift_mean=np.concatenate([[0.0], drift.mean]),
        drift_stderr=np.concatenate([[0.0], drift.stderr]),
        updates=updates,
        trials=len(sq_error),
        failed=failed,
    )
    logging.info('Divergence (%s): MSE %.6g -> %.6g over %i steps (%i trials, %i failed)', series.label,
                 series.initial_mse, series.final_mse, steps, series.trials, series.failed)

    return series
