"""
SPDX-License-Identifier: MIT

Shared fixtures: calibrated thresholds, small data files and a zero-gradient problem.
"""

import os

import hjson
import numpy as np
import pytest

from vradam.numerics import RandomSource
from vradam.problems.base import StochasticProblem

FIXTURES = os.path.join(os.path.dirname(__file__), 'fixtures')

class FlatProblem(StochasticProblem):
    """
    `F(w) = 0` everywhere: every estimate is the zero vector.
    """
    name = 'flat'

    def __init__(self, dimension: int = 2) -> None:
        self.dimension = dimension

    def loss(self, w):
        return 0.0

    def full_gradient(self, w):
        return np.zeros(self.dimension)

    def sample(self, rng):
        return 0

    def estimate(self, w, seed):
        return np.zeros(self.dimension)

    def seed_loss(self, w, seed):
        return 0.0

    def seed_distribution(self):
        yield 0, 1.0

@pytest.fixture(scope='session')
def thresholds() -> dict:
    with open(os.path.join(FIXTURES, 'thresholds.hjson'), 'r', encoding='utf8') as thresholds_file:
        return hjson.load(thresholds_file)

@pytest.fixture
def fixture_path():
    def _path(name: str) -> str:
        return os.path.join(FIXTURES, name)

    return _path

@pytest.fixture
def flat_problem() -> FlatProblem:
    return FlatProblem()

@pytest.fixture
def rng() -> RandomSource:
    return RandomSource(1234)
