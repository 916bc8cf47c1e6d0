"""
SPDX-License-Identifier: MIT

Variance-reduced ADAM (VRADAM).

Each outer iteration `t` computes the full gradient `∇F(w̃_t)` once at the snapshot `w̃_t`, then runs `m` inner ADAM
steps along the SVRG-style direction `g_k = ∇F^B(w_k) - ∇F^B(w̃_t) + ∇F(w̃_t)` with bias-corrected moments. Option A
resets the moments at the start of every outer iteration, Option B carries them over. The learning rate `α_t` is fixed
within an outer iteration and the last inner iterate becomes the next snapshot.
"""

import logging

import numpy as np

from vradam.numerics import DenseVector, RandomSource, as_vector, check_finite, check_same_length
from vradam.optimizers.state import AdamState, RunRecord, VradamConfig
from vradam.problems.base import Seed, StochasticProblem

def vradam_inner_direction(w_k: DenseVector, w_tilde: DenseVector, seed: Seed, problem: StochasticProblem,
                           full_grad_cache: DenseVector) -> DenseVector:
    """
    Return the variance-reduced direction `𝒢(w_k; ξ) - 𝒢(w̃; ξ) + ∇F(w̃)`.

    For finite sums `𝒢(·; B)` is the mini-batch gradient `∇F^B`. Any problem whose seeds can be evaluated at two points
    is accepted, which lets the two-branch sampler stand in for its finite-sum recast.

    Args:
        w_k: The current inner iterate.
        w_tilde: The snapshot of the outer iteration.
        seed: The seed (mini-batch) drawn for this inner step.
        problem: The problem providing the estimator.
        full_grad_cache: `∇F(w̃)`, computed once per outer iteration.

    Raises:
        DimensionError: If the vectors disagree on their dimension.
    """
    check_same_length(w_k, w_tilde)
    check_same_length(w_k, full_grad_cache)

    return problem.estimate(w_k, seed) - problem.estimate(w_tilde, seed) + full_grad_cache

def _one_minus_power(beta: float, exponent: int) -> float:
    if beta == 0:
        return 1.0

    # 1 - βⁿ in log-space, exact for large n
    return float(-np.expm1(exponent*np.log(beta)))

def bias_correct(m: DenseVector, v: DenseVector, k: int, t: int, inner_m: int, #pylint: disable=too-many-arguments
                 option: str, beta1: float, beta2: float) -> tuple[DenseVector, DenseVector]:
    """
    Return the bias-corrected moments `(m̃, ṽ)` of inner step `k` in outer iteration `t`.

    The exponent is `k` under Option A (the moments restart at every outer iteration) and `k + (t-1)·m` under Option B
    (the moments have accumulated every previous inner step).

    Raises:
        ValueError: If `k` is outside `[1, inner_m]`, `t < 1` or the option is unknown.
    """
    if not 1 <= k <= inner_m or t < 1:
        raise ValueError(f'Invalid location (t={t}, k={k}) for an inner loop of length {inner_m}')
    if option not in ('A', 'B'):
        raise ValueError(f'Unknown option "{option}"')

    exponent = k if option == 'A' else k + (t - 1)*inner_m
    return m / _one_minus_power(beta1, exponent), v / _one_minus_power(beta2, exponent)

def run_vradam(problem: StochasticProblem, cfg: VradamConfig, w_tilde1, T_outer: int, #pylint: disable=too-many-arguments
               rng: RandomSource, max_steps: int | None = None) -> RunRecord:
    """
    Run VRADAM for `T_outer` outer iterations of `cfg.inner_length` inner steps.

    Args:
        problem: The problem (a finite sum, or any problem whose seeds can be re-evaluated).
        cfg: The VRADAM configuration.
        w_tilde1: The first snapshot `w̃₁`.
        T_outer: The number of outer iterations.
        rng: The random source owned by this run.
        max_steps: Stop after this many inner steps in total, cutting the last outer iteration short (every step of
            the `T_outer` iterations runs when None).

    Returns:
        The full telemetry of the run, with one counted full-gradient evaluation per started outer iteration.

    Raises:
        EvaluationError: If a non-finite value appears (the `(t, k)` location is attached).
    """
    if T_outer < 1:
        raise ValueError(f'Number of outer iterations must be at least 1, got {T_outer}')
    if max_steps is not None and max_steps < 1:
        raise ValueError(f'Step cap must be at least 1, got {max_steps}')

    hyper, inner_m = cfg.hyper, cfg.inner_length
    w_tilde = as_vector(w_tilde1, 'starting point')
    problem.check_dimension(w_tilde)

    capacity = T_outer*inner_m if max_steps is None else min(T_outer*inner_m, max_steps)
    record = RunRecord.allocate(f'vradam-{cfg.label}', w_tilde, capacity)
    state = AdamState.zeros(problem.dimension)

    for t in range(1, T_outer + 1):
        if record.steps == capacity:
            break

        alpha = hyper.schedule(t)
        full_gradient = problem.full_gradient(w_tilde)
        check_finite(full_gradient, 'full gradient', location=(t, 0))
        record.full_gradient_evaluations += 1
        record.add_cost(problem.full_gradient_cost)

        if cfg.option == 'A':
            state = AdamState.zeros(problem.dimension)

        record.record_snapshot(problem, w_tilde, full_gradient, state.m, state.v)

        w = w_tilde
        for k in range(1, inner_m + 1):
            seed = problem.sample(rng)
            g = vradam_inner_direction(w, w_tilde, seed, problem, full_gradient)
            check_finite(g, 'variance-reduced direction', location=(t, k))

            m = hyper.beta1*state.m + (1 - hyper.beta1)*g
            v = hyper.beta2*state.v + (1 - hyper.beta2)*g*g
            state = AdamState(m, v, t, k)

            m_tilde, v_tilde = bias_correct(m, v, k, t, inner_m, cfg.option, hyper.beta1, hyper.beta2)
            update = -alpha * m_tilde / np.sqrt(v_tilde + hyper.epsilon)
            w = w + update
            check_finite(w, 'iterate', location=(t, k))

            record.push(problem, w, update, g, state, alpha, 2, (t, k), seed)
            if record.steps == capacity:
                break

        w_tilde = w

    logging.debug('VRADAM (%s) on %s: %i outer iterations of %i steps, F(w̃)=%.6g', cfg.label, problem.name,
                  len(record.snapshots), inner_m, problem.loss(w_tilde))
    return record
