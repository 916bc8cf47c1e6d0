"""
SPDX-License-Identifier: MIT
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vradam.exceptions import ConstructionError, DimensionError
from vradam.numerics import RandomSource, finite_difference_gradient
from vradam.problems.constructions import branch_probability, make_op_delta, make_thm2_problem, make_thm3_problem
from vradam.problems.constructions import op_branches, solve_delta_for_ratio
from vradam.problems.classification import make_logistic, make_mlp
from vradam.problems.datasets import Dataset, make_synthetic_dataset
from vradam.problems.quadratic import make_quadratic
from vradam.verify.oracles import enumerate_batches_expectation

def test_op_delta_branches():
    problem = make_op_delta(10)
    w = np.array([-100.0])

    assert problem.estimate(w, 1)[0] == pytest.approx(9990.0)
    assert problem.estimate(w, 2)[0] == pytest.approx(-11.0)
    assert problem.p == pytest.approx(11/10001)

def test_op_delta_unbiased_at_optimum():
    problem = make_op_delta(10)
    w = np.array([-100.0])

    expectation = problem.p*problem.estimate(w, 1) + (1 - problem.p)*problem.estimate(w, 2)
    assert expectation[0] == pytest.approx(0.0, abs=1e-9)
    assert problem.full_gradient(w)[0] == 0.0

def test_op_delta_constants():
    problem = make_op_delta(10)

    assert problem.loss(np.zeros(1)) == 0.0
    assert problem.loss(problem.w_star) == pytest.approx(-500.0)
    assert problem.F_star == pytest.approx(-500.0)
    assert problem.L == problem.c == pytest.approx(0.1)

@given(st.floats(min_value=1.5, max_value=50), st.floats(min_value=-1e4, max_value=1e4))
def test_op_delta_strong_convexity_identity(delta, w):
    problem = make_op_delta(delta)
    gap = problem.loss(np.array([w])) - problem.F_star

    assert gap == pytest.approx((w - problem.w_star[0])**2 / (2*delta), rel=1e-9, abs=1e-6)

def test_op_delta_rejects_small_delta():
    with pytest.raises(ValueError):
        make_op_delta(1.0)

def test_op_delta_sampling_frequency():
    problem = make_op_delta(2.0)
    rng = RandomSource(7)
    draws = [problem.sample(rng) for _ in range(20000)]

    assert draws.count(1) / len(draws) == pytest.approx(problem.p, abs=0.01)

def test_solve_delta_for_ratio():
    assert solve_delta_for_ratio(0.1) == pytest.approx(2.3961, abs=1e-4)
    assert branch_probability(solve_delta_for_ratio(0.1)) == pytest.approx(0.1, abs=1e-9)
    assert solve_delta_for_ratio(11/10001, lo=2.0) == pytest.approx(10.0, abs=1e-8)

@pytest.mark.parametrize('p', [0.0, 1.0, -0.5, 2.0])
def test_solve_delta_rejects_probability(p):
    with pytest.raises(ValueError):
        solve_delta_for_ratio(p)

def test_solve_delta_no_bracket():
    with pytest.raises(ConstructionError):
        solve_delta_for_ratio(0.5, lo=2.0)

def test_thm2_batches_reduce_to_op():
    problem = make_thm2_problem(10, 1)
    large, small = op_branches(problem.delta)

    reduced = [problem.reduced_coefficients(batch)[:2] for batch, _ in problem.seed_distribution()]
    assert sum(coefficients == pytest.approx(large) for coefficients in reduced) == 1
    assert sum(coefficients == pytest.approx(small) for coefficients in reduced) == 9

def test_thm2_gradients_at_zero():
    problem = make_thm2_problem(10, 1)
    gradients = sorted(problem.estimate(np.zeros(1), batch)[0] for batch, _ in problem.seed_distribution())

    assert gradients[0] == pytest.approx(-1.0)
    assert gradients[-1] == pytest.approx(problem.delta**4)
    assert enumerate_batches_expectation(problem, [0.0])[0] == pytest.approx(problem.delta)

def test_thm3_single_large_batch():
    problem = make_thm3_problem(20)
    large = op_branches(problem.delta)[0]

    matches = [
        batch for batch, _ in problem.seed_distribution()
        if problem.reduced_coefficients(batch)[:2] == pytest.approx(large, rel=1e-12)
    ]
    assert len(matches) == 1
    assert 19 not in matches[0]
    assert problem.batch_size == 19

@pytest.mark.parametrize('n, b', [(2, 2), (5, 0), (5, 5)])
def test_thm2_rejects_batch_size(n, b):
    with pytest.raises(ConstructionError):
        make_thm2_problem(n, b)

def test_thm3_rejects_tiny_sum():
    with pytest.raises(ConstructionError):
        make_thm3_problem(1)

@given(st.integers(min_value=3, max_value=8), st.data())
@settings(max_examples=25, deadline=None)
def test_finite_sum_unbiased(n, data):
    b = data.draw(st.integers(min_value=1, max_value=n - 1))
    problem = make_thm2_problem(n, b)
    w = np.array([data.draw(st.floats(min_value=-100, max_value=100))])

    full = problem.full_gradient(w)
    expectation = enumerate_batches_expectation(problem, w)
    assert abs(expectation[0] - full[0]) <= 1e-12 * max(1.0, abs(full[0]))

def test_quadratic_constants():
    problem = make_quadratic(1.0, 1.0, 1, noise=0.0, clip=100.0)
    w = np.array([2.0])

    assert problem.full_gradient(w)[0] == pytest.approx(2.0)
    assert problem.loss(w) - problem.F_star == pytest.approx(2.0)
    np.testing.assert_array_equal(problem.full_gradient(problem.w_star), np.zeros(1))

def test_quadratic_zero_noise_components_identical(rng):
    problem = make_quadratic(0.5, 2.0, 4, noise=0.0, clip=10.0, n_components=6, batch_size=2)
    w = rng.normal(4)

    for batch, _ in problem.seed_distribution():
        np.testing.assert_allclose(problem.estimate(w, batch), problem.full_gradient(w), rtol=0, atol=1e-12)

def test_quadratic_gradient_bound(rng):
    problem = make_quadratic(0.5, 2.0, 3, noise=2.0, clip=1.5, n_components=5)
    for _ in range(200):
        w = 10*rng.normal(3)
        assert np.linalg.norm(problem.estimate(w, problem.sample(rng))) <= problem.G_bound*(1 + 1e-12)

def test_quadratic_initial_point_unclipped():
    problem = make_quadratic(0.5, 1.0, 5, noise=0.5, clip=10.0)
    assert problem.in_clipping_region(problem.initial_point())

def test_quadratic_loss_and_gradient_agree_inside_clipping_region():
    problem = make_quadratic(0.5, 1.0, 3, noise=0.5, clip=10.0)
    inside = problem.initial_point()
    outside = 100*np.ones(3)

    assert problem.in_clipping_region(inside)
    np.testing.assert_allclose(problem.full_gradient(inside), finite_difference_gradient(problem.loss, inside),
                               rtol=1e-6, atol=1e-8)
    assert not problem.in_clipping_region(outside)
    assert np.linalg.norm(problem.full_gradient(outside)) <= problem.clip*(1 + 1e-12)
    np.testing.assert_allclose(finite_difference_gradient(problem.loss, outside), problem.hessian*outside, rtol=1e-6)

def test_quadratic_rejects_spectrum():
    with pytest.raises(ValueError):
        make_quadratic(2.0, 1.0, 2, noise=0.0, clip=1.0)

def test_dimension_check():
    with pytest.raises(DimensionError):
        make_op_delta(10).check_dimension(np.zeros(2))

def test_logistic_uniform_softmax():
    dataset = Dataset(np.array([[0.2, 0.1], [0.9, 0.4]]), np.array([0, 1]), 2)
    problem = make_logistic(dataset)

    assert problem.loss(np.zeros(problem.dimension)) == pytest.approx(math.log(2))

def test_logistic_zero_features_optimum():
    dataset = Dataset(np.zeros((4, 3)), np.array([0, 1, 0, 1]), 2)
    problem = make_logistic(dataset, l2=0.1)

    np.testing.assert_allclose(problem.full_gradient(np.zeros(problem.dimension)), 0.0, atol=1e-15)
    assert problem.c == 0.1

def test_logistic_gradient_matches_finite_differences(rng):
    problem = make_logistic(make_synthetic_dataset(50, 3, 3, seed=1), l2=1e-3)
    for _ in range(10):
        w = rng.normal(problem.dimension)
        analytic = problem.full_gradient(w)
        numeric = finite_difference_gradient(problem.loss, w, 1e-6)
        assert np.max(np.abs(analytic - numeric)) <= 1e-5 * max(1.0, np.max(np.abs(analytic)))

def test_mlp_gradient_matches_finite_differences(rng):
    problem = make_mlp(make_synthetic_dataset(40, 3, 3, seed=2), 4, seed=3)
    for _ in range(5):
        w = problem.initial_point(rng) + 0.1*rng.normal(problem.dimension)
        analytic = problem.full_gradient(w)
        numeric = finite_difference_gradient(problem.loss, w, 1e-6)
        assert np.max(np.abs(analytic - numeric)) <= 1e-4 * max(1.0, np.max(np.abs(analytic)))

def test_mlp_zero_inputs_first_layer_gradient():
    dataset = Dataset(np.zeros((5, 2)), np.array([0, 1, 2, 0, 1]), 3)
    problem = make_mlp(dataset, 3)
    w1_gradient, _, _, _ = problem.unpack(problem.full_gradient(problem.initial_point()))

    np.testing.assert_array_equal(w1_gradient, np.zeros((2, 3)))

def test_mlp_full_scale_shape():
    dataset = Dataset(np.zeros((1, 784)), np.array([9]), 10)
    assert make_mlp(dataset, 100).dimension == 784*100 + 100 + 100*10 + 10

def test_mlp_rejects_empty_hidden_layer():
    with pytest.raises(ValueError):
        make_mlp(make_synthetic_dataset(10, 2, 2), 0)
