"""
SPDX-License-Identifier: MIT

Monte-Carlo harness and the experiments built on it: divergence statistics, reset comparison, convergence-rate checks,
variance tracking and grid-search training.
"""

from vradam.experiments.divergence import DivergenceSeries, DriftEstimate, divergence_experiment, drift_estimate
from vradam.experiments.harness import ALGORITHMS, ExperimentSpec, OptimizerSpec, TrialResults, run_experiment, run_trials
from vradam.experiments.rates import GradientNormSeries, RateCheck, gradient_norm_series, rate_check, rate_constant
from vradam.experiments.reset import ResetReport, hyperparameter_condition, make_reset_problem, reset_comparison
from vradam.experiments.training import CellResult, TrainingCurve, best_cell, make_grid, relative_difference
from vradam.experiments.training import relative_pairs, steps_for_budget, train_grid
from vradam.experiments.variance import VarianceSeries, variance_track
