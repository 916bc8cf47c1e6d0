"""
SPDX-License-Identifier: MIT

Every experiment reruns bitwise identically from the same seeds.
"""

import numpy as np
import pytest

from vradam.experiments import OptimizerSpec, divergence_experiment, make_grid, rate_check, reset_comparison
from vradam.experiments import train_grid, variance_track
from vradam.numerics import RandomSource
from vradam.optimizers import AdamHyper, LearningRateSchedule, VradamConfig, run_vradam
from vradam.problems.classification import make_logistic
from vradam.problems.datasets import make_synthetic_dataset
from vradam.problems.quadratic import make_quadratic
from vradam.verify import run_battery

PROOF_REGIME = AdamHyper(LearningRateSchedule('constant', 0.001), beta1=0.0, beta2=0.999, epsilon=1e-12)

def _twice(experiment):
    return experiment(), experiment()

@pytest.mark.parametrize('optimizer, w0', [
    (OptimizerSpec('adam', PROOF_REGIME), -100.0),
    (OptimizerSpec('vradam', AdamHyper(LearningRateSchedule('constant', 0.01), beta1=0.0, epsilon=1e-12), 32, 1, 'A'),
     -80.0),
])
@pytest.mark.parametrize('vectorize', [True, False])
def test_divergence(optimizer, w0, vectorize):
    first, second = _twice(lambda: divergence_experiment(10, w0, 20, 500, 0, optimizer, workers=4, vectorize=vectorize))

    np.testing.assert_array_equal(first.mse_mean, second.mse_mean)
    np.testing.assert_array_equal(first.updates, second.updates)

@pytest.mark.parametrize('check', ['construction', 'unbiasedness', 'state-bounds', 'step-bound'])
def test_battery(check):
    first, second = _twice(lambda: run_battery(only=[check], base_seed=5))

    assert [report.as_summary() for report in first] == [report.as_summary() for report in second]

def test_rate_check():
    problem = make_quadratic(0.5, 1.0, 5, noise=0.0, clip=10.0)
    cfg = VradamConfig(AdamHyper(LearningRateSchedule('inv_t', 1.6), beta1=0.0, epsilon=100.0), 10, 1, 'A')
    first, second = _twice(lambda: rate_check(problem, cfg, 30, RandomSource(0)))

    np.testing.assert_array_equal(first.gaps, second.gaps)
    assert first.calibration == second.calibration

def test_reset_comparison():
    first, second = _twice(lambda: [reset_comparison(seed) for seed in range(5)])

    assert first == second

def test_variance_track():
    problem = make_logistic(make_synthetic_dataset(300, 4, 3), l2=0.1, batch_size=16)
    cfg = VradamConfig(AdamHyper(LearningRateSchedule('constant', 0.01)), 10, problem.batch_size, 'A')
    run = run_vradam(problem, cfg, problem.initial_point(), 2, RandomSource(0))
    first, second = _twice(lambda: variance_track(problem, run, RandomSource(1), 50, every=3))

    np.testing.assert_array_equal(first.lambda_hat, second.lambda_hat)
    np.testing.assert_array_equal(first.stderr, second.stderr)

def test_train_grid():
    problem = make_logistic(make_synthetic_dataset(200, 4, 3), l2=0.1, batch_size=16)
    cells = make_grid(('adam', 'vradam'), [LearningRateSchedule('constant', 0.01)], [6], options=('A', 'B'))
    first, second = _twice(lambda: train_grid(problem, cells, 3*problem.full_gradient_cost, seeds=2, workers=3))

    for a, b in zip(first, second):
        np.testing.assert_array_equal(a.final_losses, b.final_losses)
        for curve_a, curve_b in zip(a.curves, b.curves):
            np.testing.assert_array_equal(curve_a.loss, curve_b.loss)
