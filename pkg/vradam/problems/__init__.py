"""
SPDX-License-Identifier: MIT

Stochastic optimization problems behind a single gradient-estimator abstraction.
"""

from vradam.problems.base import FiniteSumProblem, Seed, StochasticProblem
from vradam.problems.classification import FeedforwardNetwork, LogisticRegression, make_logistic, make_mlp
from vradam.problems.constructions import OpDeltaProblem, ScalarQuadraticSum
from vradam.problems.constructions import branch_probability, make_op_delta, make_thm2_problem, make_thm3_problem
from vradam.problems.constructions import op_branches, solve_delta_for_ratio
from vradam.problems.datasets import Dataset, load_dataset, make_synthetic_dataset
from vradam.problems.quadratic import QuadraticSum, make_quadratic
