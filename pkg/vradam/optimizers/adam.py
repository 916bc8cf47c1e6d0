"""
SPDX-License-Identifier: MIT

General ADAM (a generic gradient estimator, no bias correction unless requested) and the plain SGD baseline.
"""

import logging

import numpy as np

from vradam.numerics import DenseVector, RandomSource, as_vector, check_finite, check_same_length
from vradam.optimizers.schedules import Schedule
from vradam.optimizers.state import AdamHyper, AdamState, RunRecord
from vradam.problems.base import StochasticProblem

def adam_step(state: AdamState, g: DenseVector, hyper: AdamHyper, t: int) -> tuple[AdamState, DenseVector]:
    """
    Perform one General ADAM update.

    `m' = β₁m + (1-β₁)g`, `v' = β₂v + (1-β₂)g⊙g` and `update = -α_t·m'/√(v'+ε)` elementwise. With
    `hyper.bias_correction`, `m'` and `v'` are divided by `1-β₁ᵗ` and `1-β₂ᵗ` inside the update only.

    Args:
        state: The moments before the step.
        g: The gradient estimate `𝒢(w_t; ξ_t)`.
        hyper: The hyper-parameters.
        t: The 1-based step index.

    Returns:
        The new state and the signed update to add to `w_t`.

    Raises:
        DimensionError: If `g` and the state disagree on their dimension.
        EvaluationError: If `g` or the update is not finite.
    """
    if t < 1:
        raise ValueError(f'Steps are indexed from t=1, got {t}')
    check_same_length(state.m, g)
    check_finite(g, 'gradient estimate', step=t)

    m = hyper.beta1*state.m + (1 - hyper.beta1)*g
    v = hyper.beta2*state.v + (1 - hyper.beta2)*g*g

    m_hat, v_hat = m, v
    if hyper.bias_correction:
        m_hat = m / (1 - hyper.beta1**t)
        v_hat = v / (1 - hyper.beta2**t)

    update = -hyper.schedule(t) * m_hat / np.sqrt(v_hat + hyper.epsilon)
    check_finite(update, 'update', step=t)

    return AdamState(m, v, t, 0), update

def run_general_adam(problem: StochasticProblem, hyper: AdamHyper, w1, T: int, rng: RandomSource) -> RunRecord:
    """
    Run General ADAM for `T` steps: sample `ξ_t`, compute `g_t = 𝒢(w_t; ξ_t)`, update the moments and the iterate.

    Args:
        problem: The stochastic problem.
        hyper: The hyper-parameters.
        w1: The starting point.
        T: The number of steps.
        rng: The random source owned by this run.

    Returns:
        The full telemetry of the run.

    Raises:
        EvaluationError: If a non-finite value appears (the failing step index is attached).
    """
    if T < 1:
        raise ValueError(f'Number of steps must be at least 1, got {T}')

    w = as_vector(w1, 'starting point')
    problem.check_dimension(w)

    algorithm = 'adam-bias-corrected' if hyper.bias_correction else 'adam'
    record = RunRecord.allocate(algorithm, w, T)
    state = AdamState.zeros(problem.dimension)

    for t in range(1, T + 1):
        seed = problem.sample(rng)
        g = problem.estimate(w, seed)

        state, update = adam_step(state, g, hyper, t)
        w = w + update
        check_finite(w, 'iterate', step=t)

        record.push(problem, w, update, g, state, hyper.schedule(t), 1, (t, 0), seed)

    logging.debug('General ADAM on %s: %i steps, F(w_T)=%.6g', problem.name, T, record.loss[-1])
    return record

def run_sgd(problem: StochasticProblem, schedule: Schedule, w1, T: int, rng: RandomSource) -> RunRecord:
    """
    Run plain SGD `w_{t+1} = w_t - α_t·𝒢(w_t; ξ_t)` for `T` steps.

    Raises:
        EvaluationError: If a non-finite value appears (the failing step index is attached).
    """
    if T < 1:
        raise ValueError(f'Number of steps must be at least 1, got {T}')

    w = as_vector(w1, 'starting point')
    problem.check_dimension(w)
    record = RunRecord.allocate('sgd', w, T)

    for t in range(1, T + 1):
        seed = problem.sample(rng)
        g = problem.estimate(w, seed)
        check_finite(g, 'gradient estimate', step=t)

        alpha = schedule(t)
        update = -alpha*g
        w = w + update
        check_finite(w, 'iterate', step=t)

        record.push(problem, w, update, g, None, alpha, 1, (t, 0), seed)

    logging.debug('SGD on %s: %i steps, F(w_T)=%.6g', problem.name, T, record.loss[-1])
    return record
