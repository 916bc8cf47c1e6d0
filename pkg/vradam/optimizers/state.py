"""
SPDX-License-Identifier: MIT

Hyper-parameters, moving-average state and run telemetry shared by the optimizers.
"""

import time
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from vradam.numerics import DenseVector
from vradam.optimizers.schedules import Schedule
from vradam.problems.base import Seed, StochasticProblem

OPTIONS = {'A': 'reset', 'B': 'no-reset'}

@dataclass(frozen=True)
class AdamHyper:
    """
    ADAM hyper-parameters.

    Attributes:
        schedule: The learning-rate schedule `α_t`.
        beta1: The decay rate of the first moment, in [0, 1).
        beta2: The decay rate of the second moment, in [0, 1).
        epsilon: The positive constant added under the square root.
        bias_correction: Divide the moments by `1 - βᵗ` (General ADAM only, off by default).
    """
    schedule: Schedule
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    bias_correction: bool = False

    def __post_init__(self) -> None:
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError(f'Decay rates must lie in [0, 1), got β₁={self.beta1}, β₂={self.beta2}')
        if not self.epsilon > 0:
            raise ValueError(f'ε must be positive, got {self.epsilon}')

@dataclass(frozen=True)
class AdamState:
    """
    The moving averages `m`, `v` and the step counters of an ADAM-type run.

    Attributes:
        m: The first moment.
        v: The second moment (elementwise non-negative).
        t: The global step (or outer iteration for VRADAM).
        k: The inner step (VRADAM only).
    """
    m: DenseVector
    v: DenseVector
    t: int = 0
    k: int = 0

    @classmethod
    def zeros(cls, dimension: int) -> 'AdamState':
        return cls(np.zeros(dimension), np.zeros(dimension))

@dataclass(frozen=True)
class VradamConfig:
    """
    VRADAM configuration.

    Attributes:
        hyper: The ADAM hyper-parameters (`α_t` is indexed by the outer iteration).
        inner_length: The number `m` of inner steps per outer iteration.
        batch_size: The mini-batch size `b` (informational for non finite-sum problems).
        option: `A` (reset the moments at each outer iteration) or `B` (carry them over).
    """
    hyper: AdamHyper
    inner_length: int
    batch_size: int
    option: str

    def __post_init__(self) -> None:
        if self.inner_length < 1 or self.batch_size < 1:
            raise ValueError(f'Inner length and batch size must be at least 1, got m={self.inner_length}, '
                             f'b={self.batch_size}')
        if self.option not in OPTIONS:
            raise ValueError(f'Unknown option "{self.option}": must be one of {list(OPTIONS)}')

    @property
    def label(self) -> str:
        return OPTIONS[self.option]

@dataclass
class RunRecord: #pylint: disable=too-many-instance-attributes
    """
    Per-step telemetry of one optimizer run.

    Series are preallocated for `capacity` steps; entry `i` describes step `i+1`. Objective metrics (`loss`,
    `grad_norm`) are evaluated at the iterate reached by the step; they are telemetry and are not counted as
    algorithmic full-gradient evaluations.

    Attributes:
        algorithm: The optimizer label (`adam`, `vradam-reset`, `vradam-no-reset` or `sgd`).
        initial: The starting point `w₁` (or `w̃₁`).
        iterates: The point reached after each step.
        updates: The signed update applied at each step.
        directions: The gradient estimate (or variance-reduced direction) used at each step.
        loss: `F` at each iterate.
        grad_norm: `‖∇F‖₂` at each iterate.
        update_norm: `‖update‖₂` at each step.
        m_norm: `‖m‖₂` after each step (before any bias correction).
        v_norm: `‖v‖₂` after each step (before any bias correction).
        alpha: The learning rate used at each step.
        cost: The cumulative cost in model units (one estimator evaluation = 1 unit).
        wall_clock: The cumulative measured time in seconds.
        locations: The `(t, k)` location of each step (`(step, 0)` outside VRADAM).
        seeds: The seed drawn at each step.
        snapshots: The outer iterates `w̃_t` (VRADAM only).
        snapshot_loss: `F(w̃_t)`.
        snapshot_grad_norm: `‖∇F(w̃_t)‖₂`.
        outer_start_m_norm: `‖m‖₂` at the start of each outer iteration.
        outer_start_v_norm: `‖v‖₂` at the start of each outer iteration.
        full_gradient_evaluations: The number of algorithmic full-gradient evaluations.
        steps: The number of executed steps.
    """
    algorithm: str
    initial: DenseVector
    iterates: npt.NDArray[np.float64]
    updates: npt.NDArray[np.float64]
    directions: npt.NDArray[np.float64]
    loss: npt.NDArray[np.float64]
    grad_norm: npt.NDArray[np.float64]
    update_norm: npt.NDArray[np.float64]
    m_norm: npt.NDArray[np.float64]
    v_norm: npt.NDArray[np.float64]
    alpha: npt.NDArray[np.float64]
    cost: npt.NDArray[np.float64]
    wall_clock: npt.NDArray[np.float64]
    locations: npt.NDArray[np.int64]
    seeds: list[Seed] = field(default_factory=list)
    snapshots: list[DenseVector] = field(default_factory=list)
    snapshot_loss: list[float] = field(default_factory=list)
    snapshot_grad_norm: list[float] = field(default_factory=list)
    outer_start_m_norm: list[float] = field(default_factory=list)
    outer_start_v_norm: list[float] = field(default_factory=list)
    full_gradient_evaluations: int = 0
    steps: int = 0
    _started: float = field(default_factory=time.perf_counter, repr=False)
    _units: float = field(default=0.0, repr=False)

    @classmethod
    def allocate(cls, algorithm: str, initial: DenseVector, capacity: int) -> 'RunRecord':
        """
        Create an empty record with room for `capacity` steps.
        """
        dimension = initial.size
        return cls(
            algorithm=algorithm,
            initial=initial.copy(),
            iterates=np.empty((capacity, dimension)),
            updates=np.empty((capacity, dimension)),
            directions=np.empty((capacity, dimension)),
            loss=np.empty(capacity),
            grad_norm=np.empty(capacity),
            update_norm=np.empty(capacity),
            m_norm=np.empty(capacity),
            v_norm=np.empty(capacity),
            alpha=np.empty(capacity),
            cost=np.empty(capacity),
            wall_clock=np.empty(capacity),
            locations=np.empty((capacity, 2), dtype=np.int64),
        )

    @property
    def final(self) -> DenseVector:
        """
        The last iterate (the last snapshot `w̃_{T+1}` for VRADAM).
        """
        return self.iterates[self.steps - 1] if self.steps else self.initial

    def point_before(self, step: int) -> DenseVector:
        """
        Return the iterate at which the 0-based `step` evaluated its direction.
        """
        return self.initial if step == 0 else self.iterates[step - 1]

    def add_cost(self, units: float) -> None:
        """
        Charge `units` model cost units to the next recorded step (used for full gradients).
        """
        self._units += units

    def record_snapshot(self, problem: StochasticProblem, w_tilde: DenseVector, full_gradient: DenseVector,
                        m: DenseVector, v: DenseVector) -> None:
        """
        Record the start of an outer iteration.
        """
        self.snapshots.append(w_tilde.copy())
        self.snapshot_loss.append(problem.loss(w_tilde))
        self.snapshot_grad_norm.append(float(np.linalg.norm(full_gradient)))
        self.outer_start_m_norm.append(float(np.linalg.norm(m)))
        self.outer_start_v_norm.append(float(np.linalg.norm(v)))

    def push(self, problem: StochasticProblem, w: DenseVector, update: DenseVector, #pylint: disable=too-many-arguments
             direction: DenseVector, state: AdamState | None, alpha: float, units: float,
             location: tuple[int, int], seed: Seed) -> None:
        """
        Append one step to the series.
        """
        i = self.steps
        self._units += units

        self.iterates[i] = w
        self.updates[i] = update
        self.directions[i] = direction
        self.loss[i] = problem.loss(w)
        self.grad_norm[i] = np.linalg.norm(problem.full_gradient(w))
        self.update_norm[i] = np.linalg.norm(update)
        self.m_norm[i] = np.linalg.norm(state.m) if state is not None else 0.0
        self.v_norm[i] = np.linalg.norm(state.v) if state is not None else 0.0
        self.alpha[i] = alpha
        self.cost[i] = self._units
        self.wall_clock[i] = time.perf_counter() - self._started
        self.locations[i] = location
        self.seeds.append(seed)

        self.steps += 1
