"""
SPDX-License-Identifier: MIT

Monte-Carlo harness: fans independent trials out over a pool of worker threads with `asyncio` directives.

Trial `i` owns the random stream `(base_seed, i)` and its own optimizer state, so trials are sealed from one another.
Results are reduced in trial order once every task has completed: thread scheduling cannot change an aggregate. A
failed trial raises a `TrialException`; it is logged and counted, never silently dropped.
"""

import asyncio
import logging
import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Generic, TypeVar

from vradam.exceptions import ToolkitException, TrialException
from vradam.numerics import RandomSource
from vradam.optimizers.adam import run_general_adam, run_sgd
from vradam.optimizers.state import AdamHyper, RunRecord, VradamConfig
from vradam.optimizers.variance_reduced import run_vradam
from vradam.problems.base import StochasticProblem
from vradam.utils import get_current_task_name

ResultT = TypeVar('ResultT')

ALGORITHMS = ('adam', 'vradam', 'sgd')

@dataclass(frozen=True)
class OptimizerSpec:
    """
    Which optimizer to run, with its hyper-parameters.

    Attributes:
        algorithm: One of `adam`, `vradam` or `sgd` (SGD only uses the schedule of `hyper`).
        hyper: The ADAM hyper-parameters.
        inner_length: The VRADAM inner loop length `m`.
        batch_size: The mini-batch size `b` (informational, the problem samples its own batches).
        option: The VRADAM option (`A` or `B`), required for VRADAM.
    """
    algorithm: str
    hyper: AdamHyper
    inner_length: int = 1
    batch_size: int = 1
    option: str | None = None

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f'Unknown optimizer "{self.algorithm}": must be one of {ALGORITHMS}')
        if self.algorithm == 'vradam' and self.option is None:
            raise ValueError('VRADAM requires an explicit option (A or B)')

    @property
    def vradam_config(self) -> VradamConfig:
        return VradamConfig(self.hyper, self.inner_length, self.batch_size, self.option)

    @property
    def label(self) -> str:
        if self.algorithm == 'vradam':
            return f'vradam-{self.vradam_config.label} m={self.inner_length} {self.hyper.schedule.label}'

        return f'{self.algorithm} {self.hyper.schedule.label}'

    def run(self, problem: StochasticProblem, w0, steps: int, rng: RandomSource) -> RunRecord:
        """
        Run the optimizer for a budget of `steps` estimator steps.

        VRADAM runs `ceil(steps/m)` outer iterations and stops after exactly `steps` inner steps (the last outer
        iteration may be cut short), so that every optimizer reports the same step axis.
        """
        if self.algorithm == 'adam':
            return run_general_adam(problem, self.hyper, w0, steps, rng)
        if self.algorithm == 'sgd':
            return run_sgd(problem, self.hyper.schedule, w0, steps, rng)

        return run_vradam(problem, self.vradam_config, w0, math.ceil(steps / self.inner_length), rng, max_steps=steps)

@dataclass(frozen=True)
class ExperimentSpec: #pylint: disable=too-many-instance-attributes
    """
    A Monte-Carlo experiment: one problem, one optimizer, many seeded trials.

    Attributes:
        name: A short label used in logs and outputs.
        problem: The (shared, read-only) problem.
        optimizer: The optimizer run by every trial.
        trials: The number of trials.
        steps: The step budget of each trial.
        w0: The starting point (the problem's default when None).
        base_seed: The base seed; trial `i` uses the stream `i`.
        workers: The size of the worker pool.
        shared_stream: Force every trial onto stream 0 (degenerate replication).
    """
    name: str
    problem: StochasticProblem
    optimizer: OptimizerSpec
    trials: int
    steps: int
    w0: object = None
    base_seed: int = 0
    workers: int = 8
    shared_stream: bool = False

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f'An experiment needs at least one trial, got {self.trials}')
        if self.steps < 1:
            raise ValueError(f'An experiment needs at least one step, got {self.steps}')

@dataclass
class TrialResults(Generic[ResultT]):
    """
    The ordered outcomes of a fan-out.

    Attributes:
        outcomes: The results of the successful trials, in trial order.
        trials: The indices of the successful trials.
        failures: The exceptions of the failed trials, in trial order.
    """
    outcomes: list[ResultT] = field(default_factory=list)
    trials: list[int] = field(default_factory=list)
    failures: list[TrialException] = field(default_factory=list)

    @property
    def failed(self) -> int:
        return len(self.failures)

async def _run_trial(executor: ThreadPoolExecutor, trial_fn: Callable[[RandomSource], ResultT], trial: int,
                     rng: RandomSource) -> ResultT:
    logging.debug('[%s] Starting trial #%i (%s)', get_current_task_name(), trial, rng)
    try:
        return await asyncio.get_running_loop().run_in_executor(executor, trial_fn, rng)
    except (ToolkitException, ArithmeticError, ValueError) as error:
        raise TrialException(trial, error) from error

def _log_completion(task: asyncio.Task) -> None:
    if task.cancelled():
        logging.warning('[%s] Trial cancelled', task.get_name())
    elif task.exception() is not None:
        logging.error('[%s] %s', task.get_name(), task.exception())
    else:
        logging.debug('[%s] Trial done', task.get_name())

async def asyncio_main(trial_fn: Callable[[RandomSource], ResultT], trials: int, base_seed: int, workers: int,
                       shared_stream: bool = False) -> list:
    """
    Run `trials` calls of `trial_fn` on a pool of `workers` threads, one `asyncio` task per trial.

    Returns:
        The per-trial results or `TrialException`s, in trial order.
    """
    tasks = []
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        for trial in range(trials):
            rng = RandomSource(base_seed, 0 if shared_stream else trial)
            task = asyncio.create_task(_run_trial(executor, trial_fn, trial, rng), name=f'Task-{trial}')
            task.add_done_callback(_log_completion)
            tasks.append(task)

        return await asyncio.gather(*tasks, return_exceptions=True)

def run_trials(trial_fn: Callable[[RandomSource], ResultT], trials: int, base_seed: int, workers: int = 8,
               shared_stream: bool = False) -> TrialResults[ResultT]:
    """
    Fan `trials` independent trials out and collect their results in trial order.

    Args:
        trial_fn: The trial body, called with the trial's own `RandomSource`.
        trials: The number of trials.
        base_seed: The base seed (trial `i` uses the stream `i`).
        workers: The size of the worker pool.
        shared_stream: Run every trial on stream 0.

    Returns:
        The ordered outcomes and failures.

    Raises:
        ValueError: If `trials < 1`.
    """
    if trials < 1:
        raise ValueError(f'Need at least one trial, got {trials}')

    results = TrialResults()
    for trial, outcome in enumerate(asyncio.run(asyncio_main(trial_fn, trials, base_seed, workers, shared_stream))):
        if isinstance(outcome, TrialException):
            results.failures.append(outcome)
        elif isinstance(outcome, BaseException):
            raise outcome
        else:
            results.outcomes.append(outcome)
            results.trials.append(trial)

    if results.failures:
        logging.warning('%i/%i trials failed (first failure: %s)', results.failed, trials, results.failures[0])

    return results

def run_experiment(spec: ExperimentSpec,
                   reducer: Callable[[RunRecord], ResultT] | None = None) -> TrialResults[ResultT]:
    """
    Run every trial of an experiment, optionally reducing each `RunRecord` inside its worker.

    Args:
        spec: The experiment.
        reducer: A function applied to each record before it leaves the worker (keeps the record when None).

    Returns:
        The ordered (reduced) outcomes and failures.
    """
    w0 = spec.problem.initial_point() if spec.w0 is None else spec.w0

    def _trial(rng: RandomSource):
        record = spec.optimizer.run(spec.problem, w0, spec.steps, rng)
        return record if reducer is None else reducer(record)

    logging.info('Running %i trials of %s on %s (%i workers)...', spec.trials, spec.optimizer.label,
                 spec.problem.name, spec.workers)
    results = run_trials(_trial, spec.trials, spec.base_seed, spec.workers, spec.shared_stream)
    logging.info('Experiment "%s": %i/%i trials completed [SUCCESS]', spec.name, len(results.outcomes), spec.trials)

    return results
