"""
SPDX-License-Identifier: MIT

Analytic bounds swept over recorded runs: the VRADAM moment bounds `‖m‖₂ <= 3G`, `‖v‖₂ <= 9G²` and the step-length
bound of General ADAM.
"""

import numpy as np

from vradam.numerics import DenseVector
from vradam.optimizers.state import AdamHyper, RunRecord
from vradam.problems.base import StochasticProblem
from vradam.verify.reports import OracleReport

# Rounding slack on analytic ratios that can be reached with equality
RATIO_SLACK = 1e-12

def realized_gradient_bound(problem: StochasticProblem, points: list[DenseVector]) -> float:
    """
    Return the largest estimator norm over every seed of a finite seed distribution, at the given points.

    Used in place of a declared `G` for problems whose estimator is only bounded on the region a run visits.
    """
    return max(
        float(np.linalg.norm(problem.estimate(w, seed)))
        for w in points
        for seed, _ in problem.seed_distribution()
    )

def visited_points(record: RunRecord) -> list[DenseVector]:
    """
    Return every point where a run evaluated the estimator: its iterates before each step, then its snapshots.
    """
    return [record.point_before(i) for i in range(record.steps)] + list(record.snapshots)

def sweep_state_bounds(record: RunRecord, G_bound: float) -> OracleReport:
    """
    Sweep `‖m‖₂/3G` and `‖v‖₂/9G²` over every step of a VRADAM Option A run; both must stay at or below 1.

    Raises:
        ValueError: If `G_bound` is not positive or the record is empty.
    """
    if not G_bound > 0:
        raise ValueError(f'G must be positive, got {G_bound}')
    if record.steps == 0:
        raise ValueError(f'Record "{record.algorithm}" holds no step')

    m_ratio = float(np.max(record.m_norm[:record.steps])) / (3*G_bound)
    v_ratio = float(np.max(record.v_norm[:record.steps])) / (9*G_bound**2)

    return OracleReport('state-bounds', f'{record.algorithm} ({record.steps} steps, G={G_bound:.6g})',
                        max(m_ratio, v_ratio), 1.0, f'max ‖m‖/3G = {m_ratio:.6g}, max ‖v‖/9G² = {v_ratio:.6g}')

def step_bound(hyper: AdamHyper, t: int) -> float:
    """
    Return the per-coordinate bound on `|update|` of General ADAM at step `t`.

    `α_t/√(1-β₂)` when `β₁ = 0`, `α_t(1-β₁)/√((1-β₂)(1-β₁²/β₂))` otherwise (requires `β₁² < β₂`), multiplied by
    `√(1-β₂ᵗ)/(1-β₁ᵗ)` under bias correction.

    Raises:
        ValueError: If `β₁ > 0` and `β₁² >= β₂`.
    """
    beta1, beta2 = hyper.beta1, hyper.beta2
    if beta1 == 0:
        bound = hyper.schedule(t) / np.sqrt(1 - beta2)
    elif beta1**2 < beta2:
        bound = hyper.schedule(t) * (1 - beta1) / np.sqrt((1 - beta2) * (1 - beta1**2/beta2))
    else:
        raise ValueError(f'No step bound for β₁={beta1} and β₂={beta2} (β₁² >= β₂)')

    if hyper.bias_correction:
        bound *= np.sqrt(1 - beta2**t) / (1 - beta1**t)

    return float(bound)

def check_step_bound(record: RunRecord, hyper: AdamHyper) -> OracleReport:
    """
    Check that every coordinate of every General ADAM update stays within `step_bound`.

    The violation is the largest `|update_i|/bound_t` ratio.
    """
    if record.steps == 0:
        raise ValueError(f'Record "{record.algorithm}" holds no step')

    steps = record.locations[:record.steps, 0]
    bounds = np.array([step_bound(hyper, int(t)) for t in steps])
    ratios = np.max(np.abs(record.updates[:record.steps]), axis=1) / bounds
    worst = int(np.argmax(ratios))

    return OracleReport('step-bound', f'{record.algorithm} ({record.steps} steps)', float(ratios[worst]),
                        1.0 + RATIO_SLACK, f'worst step {int(steps[worst])}')
