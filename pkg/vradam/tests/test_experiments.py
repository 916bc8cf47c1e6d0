"""
SPDX-License-Identifier: MIT
"""

import numpy as np
import pytest

from vradam.exceptions import ConfigurationError, EvaluationError, ReplayError, TimeRangeError, TrialException
from vradam.experiments import OptimizerSpec, best_cell, divergence_experiment, drift_estimate, gradient_norm_series
from vradam.experiments import hyperparameter_condition, make_grid, make_reset_problem, rate_check, rate_constant
from vradam.experiments import relative_difference, relative_pairs, reset_comparison, run_trials, steps_for_budget
from vradam.experiments import train_grid, variance_track
from vradam.numerics import RandomSource
from vradam.optimizers import AdamHyper, LearningRateSchedule, OuterRates, VradamConfig, run_vradam
from vradam.problems.classification import make_logistic
from vradam.problems.constructions import make_thm2_problem
from vradam.problems.datasets import make_synthetic_dataset
from vradam.problems.quadratic import make_quadratic

PROOF_REGIME = AdamHyper(LearningRateSchedule('constant', 0.001), beta1=0.0, beta2=0.999, epsilon=1e-12)

@pytest.fixture(scope='module')
def adam_divergence(thresholds):
    """
    ADAM without momentum started at the optimum of OP(10), at the full calibrated size.
    """
    setup = thresholds['divergence']
    return divergence_experiment(10, -100.0, setup['trials'], setup['steps'], 0, OptimizerSpec('adam', PROOF_REGIME))

def _vradam_spec(alpha: float = 0.01, inner_length: int = 32, option: str = 'A', beta1: float = 0.9) -> OptimizerSpec:
    hyper = AdamHyper(LearningRateSchedule('constant', alpha), beta1=beta1, beta2=0.999, epsilon=1e-12)
    return OptimizerSpec('vradam', hyper, inner_length, 1, option)

# Divergence

def test_adam_drifts_away_from_optimum(adam_divergence, thresholds):
    setup = thresholds['divergence']

    assert adam_divergence.initial_mse == 0.0
    assert adam_divergence.failed == 0
    assert adam_divergence.final_mse > setup['growth_factor'] * adam_divergence.mse_at(setup['early_step'])

def test_adam_drift_is_positive(adam_divergence, thresholds):
    setup = thresholds['divergence']
    drift = drift_estimate(adam_divergence.updates, setup['warmup'], setup['confidence'])

    assert drift.samples == setup['trials']
    assert drift.confidence == 0.99
    assert drift.positive
    assert drift.low <= drift.mean <= drift.high

def test_divergence_series_shape(adam_divergence, thresholds):
    steps = thresholds['divergence']['steps']

    assert adam_divergence.t.size == steps + 1
    assert adam_divergence.updates.shape == (thresholds['divergence']['trials'], steps)
    assert adam_divergence.drift_mean[0] == 0.0

def test_vradam_converges_on_op(thresholds):
    setup = thresholds['vradam_divergence']
    spec = _vradam_spec(setup['alpha'], setup['inner_length'], 'A', beta1=0.0)
    series = divergence_experiment(10, setup['w0'], setup['trials'], setup['steps'], 0, spec)

    assert series.trials == setup['trials']
    assert series.failed == 0
    assert series.t[-1] == setup['steps']
    assert series.final_mse < setup['final_mse']

def test_vradam_small_rate_does_not_reach_op_optimum(thresholds):
    setup = thresholds['vradam_divergence']
    series = divergence_experiment(10, setup['w0'], 4, setup['steps'], 0,
                                   _vradam_spec(0.001, setup['inner_length'], 'A', beta1=0.0))

    assert series.final_mse > setup['final_mse']

def test_vradam_stays_at_op_optimum():
    series = divergence_experiment(10, -100.0, 2, 320, 0, _vradam_spec(), workers=2)
    assert series.final_mse == 0.0

@pytest.mark.parametrize('optimizer', [
    OptimizerSpec('adam', PROOF_REGIME),
    OptimizerSpec('adam', AdamHyper(LearningRateSchedule('inv_sqrt_t', 0.5), bias_correction=True)),
    OptimizerSpec('sgd', AdamHyper(LearningRateSchedule('inv_t', 1.0))),
    _vradam_spec(inner_length=32, option='A'),
    _vradam_spec(alpha=0.05, inner_length=7, option='B'),
])
def test_vectorized_trials_match_worker_pool(optimizer):
    vectorized = divergence_experiment(10, -90.0, 5, 150, 3, optimizer)
    pooled = divergence_experiment(10, -90.0, 5, 150, 3, optimizer, workers=2, vectorize=False)

    np.testing.assert_array_equal(vectorized.mse_mean, pooled.mse_mean)
    np.testing.assert_array_equal(vectorized.updates, pooled.updates)
    assert vectorized.t[-1] == pooled.t[-1] == 150

def test_every_trial_overflowing_is_an_error():
    spec = OptimizerSpec('sgd', AdamHyper(LearningRateSchedule('constant', 1e3)))

    with pytest.raises(ValueError):
        divergence_experiment(10, -90.0, 3, 400, 0, spec)
    with pytest.raises(ValueError):
        divergence_experiment(10, -90.0, 3, 400, 0, spec, workers=2, vectorize=False)

def test_vradam_step_axis_when_inner_length_does_not_divide():
    series = divergence_experiment(10, -80.0, 2, 100, 0, _vradam_spec(inner_length=32), workers=2, vectorize=False)

    assert series.t[-1] == 100
    assert series.updates.shape == (2, 100)

def test_sgd_decreasing_rate_mse_decreases():
    # α_t·L = 1/t: the iterate is w* minus a running average of the centered gradient noise
    spec = OptimizerSpec('sgd', AdamHyper(LearningRateSchedule('inv_t', 10.0)))
    series = divergence_experiment(10, -80.0, 1000, 2000, 0, spec)

    assert series.failed == 0
    assert series.mse_at(2000) < series.mse_at(200) < series.mse_at(20)

def test_divergence_on_finite_sum():
    problem = make_thm2_problem(10, 1)
    series = divergence_experiment(problem.delta, float(problem.w_star[0]), 4, 200, 0, OptimizerSpec('adam', PROOF_REGIME),
                                   problem=problem, workers=2)

    assert series.trials == 4
    assert series.w_star == pytest.approx(-problem.delta**2)

def test_divergence_is_reproducible():
    a = divergence_experiment(10, -100.0, 3, 100, 7, OptimizerSpec('adam', PROOF_REGIME), workers=3, vectorize=False)
    b = divergence_experiment(10, -100.0, 3, 100, 7, OptimizerSpec('adam', PROOF_REGIME), workers=1, vectorize=False)

    np.testing.assert_array_equal(a.mse_mean, b.mse_mean)

def test_shared_stream_replicates_one_trial():
    series = divergence_experiment(10, -100.0, 3, 100, 7, OptimizerSpec('adam', PROOF_REGIME), shared_stream=True)
    np.testing.assert_array_equal(series.mse_stderr, np.zeros(101))

def test_divergence_needs_two_trials():
    with pytest.raises(ValueError):
        divergence_experiment(10, -100.0, 1, 100, 0, OptimizerSpec('adam', PROOF_REGIME))

def test_drift_estimate_from_arrays():
    drift = drift_estimate([np.array([5.0, 5.0, 1.0, 1.0]), np.array([5.0, 5.0, 3.0, 3.0])], warmup=2)

    assert drift.mean == pytest.approx(2.0)
    assert drift.samples == 2

def test_drift_estimate_pools_single_trial():
    drift = drift_estimate([np.array([0.0, 1.0, 1.0, 1.0])], warmup=1)

    assert drift.mean == 1.0
    assert drift.stderr == 0.0
    assert drift.samples == 3

def test_drift_estimate_empty_window():
    with pytest.raises(ValueError):
        drift_estimate([np.ones(10)], warmup=10)

# Harness

def test_run_trials_counts_failures():
    def _trial(rng: RandomSource) -> int:
        if rng.stream_id == 1:
            raise ValueError('boom')
        return rng.stream_id

    results = run_trials(_trial, 4, 0, workers=2)

    assert results.outcomes == [0, 2, 3]
    assert results.trials == [0, 2, 3]
    assert results.failed == 1
    assert isinstance(results.failures[0], TrialException)
    assert results.failures[0].trial == 1

def test_run_trials_needs_a_trial():
    with pytest.raises(ValueError):
        run_trials(lambda rng: 0, 0, 0)

def test_vradam_spec_runs_the_exact_step_budget():
    problem = make_thm2_problem(10, 1)
    record = _vradam_spec(inner_length=32).run(problem, problem.w_star, 100, RandomSource(0))

    assert record.steps == 100
    assert len(record.snapshots) == 4
    assert record.full_gradient_evaluations == 4
    assert tuple(record.locations[99]) == (4, 4)

def test_optimizer_spec_validation():
    with pytest.raises(ValueError):
        OptimizerSpec('adagrad', PROOF_REGIME)
    with pytest.raises(ValueError):
        OptimizerSpec('vradam', PROOF_REGIME)

# Rates

def _rate_cfg(alpha: float, thresholds, schedule: str = 'inv_t', option: str = 'A') -> VradamConfig:
    setup = thresholds['rate_check']
    hyper = AdamHyper(LearningRateSchedule(schedule, alpha), beta1=setup['beta1'], epsilon=setup['epsilon'])
    return VradamConfig(hyper, setup['inner_length'], 1, option)

def _rate_problem(thresholds):
    return make_quadratic(0.5, 1.0, thresholds['rate_check']['dimension'], noise=0.0, clip=10.0)

def test_rate_constant():
    assert rate_constant(0.5, 0.9, 10.0, 0.0) == pytest.approx(0.1/30)
    assert rate_constant(0.5, 0.0, 10.0, 100.0) == pytest.approx(1/np.sqrt(1000))

def test_rate_check_passes_on_quadratic(thresholds):
    setup = thresholds['rate_check']
    low, high = setup['exponent_range']
    calibration = tuple(setup['calibration'])
    check = rate_check(_rate_problem(thresholds), _rate_cfg(setup['alpha'], thresholds), setup['outer_iterations'],
                       RandomSource(0), calibration=calibration)

    assert low <= check.exponent <= high
    assert check.calibration_range == calibration
    assert check.gaps.size == setup['outer_iterations'] + 1
    assert check.passed
    assert check.gap_at(setup['outer_iterations']) < check.gap_at(setup['early_outer'])
    assert check.fitted_slope < -check.exponent

@pytest.mark.parametrize('alpha, schedule, option', [(40.0, 'inv_t', 'A'), (1.0, 'constant', 'A'), (1.0, 'inv_t', 'B')])
def test_rate_check_rejects_configuration(thresholds, alpha, schedule, option):
    with pytest.raises(ConfigurationError):
        rate_check(_rate_problem(thresholds), _rate_cfg(alpha, thresholds, schedule, option), 40, RandomSource(0))

def test_rate_check_needs_declared_constants(thresholds):
    problem = make_logistic(make_synthetic_dataset(20, 2, 2))
    with pytest.raises(ConfigurationError):
        rate_check(problem, _rate_cfg(1.0, thresholds), 40, RandomSource(0))

def test_gradient_norm_series():
    problem = make_quadratic(0.5, 1.0, 3, noise=0.5, clip=10.0)
    cfg = VradamConfig(AdamHyper(LearningRateSchedule('inv_t', 0.5)), 10, 1, 'A')
    records = [run_vradam(problem, cfg, problem.initial_point(), 8, RandomSource(0, stream)) for stream in range(3)]

    series = gradient_norm_series(records)
    assert series.mean.shape == (8,)
    assert np.all(series.variance >= 0)
    assert np.all(np.diff(series.min_so_far) <= 0)

    with pytest.raises(ValueError):
        gradient_norm_series([])

# Variance

def _reset_run(problem, outer: int = 3, inner: int = 8):
    cfg = VradamConfig(AdamHyper(LearningRateSchedule('constant', 0.05)), inner, 1, 'A')
    return run_vradam(problem, cfg, np.array([2.0]), outer, RandomSource(5))

def test_variance_vanishes_without_noise(thresholds):
    problem = make_quadratic(0.5, 1.0, 3, noise=0.0, clip=10.0)
    cfg = VradamConfig(AdamHyper(LearningRateSchedule('constant', 0.05)), 5, 1, 'A')
    run = run_vradam(problem, cfg, problem.initial_point(), 2, RandomSource(1))

    series = variance_track(problem, run, RandomSource(2), thresholds['variance']['resamples'])
    np.testing.assert_array_equal(series.lambda_hat, np.zeros(10))
    assert series.passed

def test_variance_is_zero_at_snapshot(thresholds):
    problem = make_reset_problem(spread=0.5)
    series = variance_track(problem, _reset_run(problem), RandomSource(2), thresholds['variance']['resamples'], every=8)

    np.testing.assert_array_equal(series.lambda_hat, np.zeros(3))
    np.testing.assert_array_equal(series.bound, np.zeros(3))

def test_variance_bounded_by_distance_to_snapshot(thresholds):
    setup = thresholds['variance']
    problem = make_reset_problem(spread=0.5)
    series = variance_track(problem, _reset_run(problem), RandomSource(3), setup['resamples'])

    assert series.violations(setup['z']) == []
    assert series.lambda_hat.size == 24

def test_variance_bounded_on_logistic_run(thresholds):
    setup = thresholds['variance']
    problem = make_logistic(make_synthetic_dataset(2000, 10, 3), l2=0.1, batch_size=64)
    cfg = VradamConfig(AdamHyper(LearningRateSchedule('constant', 0.01)), 31, problem.batch_size, 'A')
    run = run_vradam(problem, cfg, problem.initial_point(), 2, RandomSource(0))

    series = variance_track(problem, run, RandomSource(1), setup['logistic_resamples'], every=5)

    assert series.resamples == 200
    assert series.lambda_hat.size == 13
    assert series.lambda_hat[0] == 0.0
    assert np.max(series.lambda_hat) > 0
    assert series.violations(setup['z']) == []

def test_variance_replay_detects_tampering(thresholds):
    problem = make_reset_problem(spread=0.5)
    run = _reset_run(problem)
    run.directions[4] += 1.0

    with pytest.raises(ReplayError) as error:
        variance_track(problem, run, RandomSource(2), thresholds['variance']['resamples'])
    assert (error.value.t, error.value.k) == (1, 5)

def test_variance_track_arguments():
    problem = make_reset_problem()
    run = _reset_run(problem, outer=1)
    with pytest.raises(ValueError):
        variance_track(problem, run, RandomSource(0), resamples=10)
    with pytest.raises(ValueError):
        variance_track(problem, run, RandomSource(0), every=0)

# Reset comparison

@pytest.mark.parametrize('seed', range(100))
def test_reset_not_worse(seed):
    report = reset_comparison(seed)

    assert report.clause3_ok
    assert report.holds()

def test_reset_memoryless_moments_on_zero_variance_problem():
    problem = make_reset_problem(spread=0.0)
    report = reset_comparison(3, problem, beta1=0.0, beta2=0.0)

    assert report.F_A == pytest.approx(report.F_B, abs=1e-12)
    assert not report.asserted

def test_reset_at_minimizer_of_zero_variance_problem():
    report = reset_comparison(0, make_reset_problem(spread=0.0), w0=0.0)

    assert report.F_A == report.F_B == 0.0

@pytest.mark.parametrize('seed', range(20))
def test_reset_weak_momentum_is_never_asserted(seed):
    report = reset_comparison(seed, beta1=0.4)

    assert not report.clause3_ok
    assert not report.asserted
    assert report.holds()

def test_hyperparameter_condition():
    hyper = AdamHyper(OuterRates((0.3, 2.6)), 0.9, 0.999, 0.6)
    assert hyperparameter_condition(hyper, 5, 1.0, 1.0, 1.0)

    weak_momentum = AdamHyper(OuterRates((0.3, 2.6)), 0.5, 0.999, 0.6)
    assert not hyperparameter_condition(weak_momentum, 5, 1.0, 1.0, 1.0)

def test_reset_problem_objective():
    problem = make_reset_problem(spread=0.3, minimizer=2.0)

    assert problem.curvature == pytest.approx(1.0)
    assert problem.w_star[0] == pytest.approx(2.0)
    assert problem.loss(np.array([3.0])) == pytest.approx(0.5)

    with pytest.raises(ValueError):
        make_reset_problem(spread=1.0)

# Training

def test_relative_difference():
    axis, relative = relative_difference([0, 1, 2], [1, 2, 3], [0, 1, 2], [1, 2, 3])
    np.testing.assert_array_equal(relative, np.zeros(3))
    np.testing.assert_array_equal(axis, [0.0, 1.0, 2.0])

    _, relative = relative_difference([0, 2], [2, 4], [0, 1, 2], [1, 1.5, 2])
    np.testing.assert_allclose(relative, np.ones(3))

def test_relative_difference_errors():
    with pytest.raises(TimeRangeError):
        relative_difference([0, 1], [1, 1], [2, 3], [1, 1])
    with pytest.raises(EvaluationError):
        relative_difference([0, 1], [1, 1], [0, 1], [0, 0])

def test_steps_for_budget():
    problem = make_logistic(make_synthetic_dataset(10, 2, 2))
    hyper = AdamHyper(LearningRateSchedule('constant', 0.01))

    assert steps_for_budget(OptimizerSpec('adam', hyper), problem, 100) == 100
    assert steps_for_budget(OptimizerSpec('vradam', hyper, 5, 1, 'A'), problem, 100) == 25
    assert steps_for_budget(OptimizerSpec('vradam', hyper, 50, 1, 'A'), problem, 100) == 50
    with pytest.raises(ValueError):
        steps_for_budget(OptimizerSpec('adam', hyper), problem, 0)

def test_make_grid():
    schedules = [LearningRateSchedule('constant', 0.01), LearningRateSchedule('inv_t', 0.05)]
    cells = make_grid(('adam', 'vradam'), schedules, [5, 10], options=('A', 'B'))

    assert len(cells) == 2 + 2*2*2
    assert sum(cell.algorithm == 'adam' for cell in cells) == 2

def test_train_grid_small():
    problem = make_logistic(make_synthetic_dataset(30, 2, 2, seed=4), l2=1e-3)
    cells = make_grid(('adam', 'vradam'), [LearningRateSchedule('constant', 0.01)], [30], options=('A', 'B'))

    results = train_grid(problem, cells, 2*problem.full_gradient_cost, seeds=2, workers=2)
    assert len(results) == 3
    assert all(result.failed == 0 and len(result.curves) == 2 for result in results)
    assert results[0].curves[0].cost[-1] == 60
    assert results[1].curves[0].cost[-1] == 90

    assert best_cell(results, 'vradam', 'B').optimizer.option == 'B'
    with pytest.raises(ValueError):
        best_cell(results, 'sgd')

    pairs = relative_pairs(results)
    assert len(pairs) == 2
    vradam, adam, axis, relative = pairs[0]
    assert (vradam.optimizer.algorithm, adam.optimizer.algorithm) == ('vradam', 'adam')
    assert axis[0] == pytest.approx(32.0) and axis[-1] == pytest.approx(60.0)
    assert np.all(np.isfinite(relative))
