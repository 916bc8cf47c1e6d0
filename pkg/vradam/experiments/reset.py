"""
SPDX-License-Identifier: MIT

Option A (resetting) against Option B (carrying the moments) on the first update of the second outer iteration.

Both options share the seeds of the first outer iteration, so they agree on every iterate through `t = 1`. The first
direction of `t = 2` is the full gradient at the new snapshot for both; only the moments used to scale it differ. When
the realized run satisfies the comparison hypotheses, the resetting option cannot end with a larger objective.
"""

import logging
from dataclasses import dataclass

import numpy as np

from vradam.numerics import RandomSource
from vradam.optimizers.schedules import OuterRates, Schedule
from vradam.optimizers.state import AdamHyper, VradamConfig
from vradam.optimizers.variance_reduced import run_vradam
from vradam.problems.constructions import ScalarQuadraticSum

DEFAULT_RATES = OuterRates((0.3, 2.6))

@dataclass(frozen=True)
class ResetReport: #pylint: disable=too-many-instance-attributes
    """
    The outcome of one reset comparison.

    Attributes:
        seed: The seed shared by both runs.
        F_A: The objective after the first update of `t = 2` with resetting.
        F_B: The same with the moments carried over.
        clause1_ok: Every realized direction of `t = 1`, and the first of `t = 2`, is bounded by `G`.
        clause2_ok: `|m|` at the end of `t = 1` is at least `|F'(w̃₂)|`.
        clause3_ok: `Lα₂ >= 2√(G²+ε)` and `L/c <= (2β₁-1)/(1-β₁^(m+1))·√(ε/(G²+ε))`.
    """
    seed: int
    F_A: float
    F_B: float
    clause1_ok: bool
    clause2_ok: bool
    clause3_ok: bool

    @property
    def asserted(self) -> bool:
        """
        Whether every hypothesis held on the realized run (otherwise the comparison is reported, not asserted).
        """
        return self.clause1_ok and self.clause2_ok and self.clause3_ok

    def holds(self, tol: float = 1e-12) -> bool:
        """
        Whether the comparison is consistent: unasserted, or `F_B >= F_A - tol`.
        """
        return not self.asserted or self.F_B >= self.F_A - tol

def make_reset_problem(spread: float = 0.2, n_components: int = 10, batch_size: int = 1, seed: int = 0,
                       minimizer: float = 0.0) -> ScalarQuadraticSum:
    """
    Build the one-dimensional comparison problem: curvatures `1 + spread·u_n` re-centered on a mean of exactly 1.

    The objective is `F(w) = (w - minimizer)²/2` (so `L = c = 1`) while mini-batch curvatures differ, which makes the
    variance-reduced directions random away from the snapshot. `spread = 0` gives a zero-variance problem.

    Raises:
        ValueError: If `spread` is outside `[0, 1)`.
    """
    if not 0 <= spread < 1:
        raise ValueError(f'Curvature spread must be in [0, 1), got {spread}')

    u = RandomSource(seed).uniforms(n_components) - 0.5
    curvatures = 1 + spread*(u - u.mean())
    curvatures /= curvatures.mean()

    return ScalarQuadraticSum(curvatures, -curvatures*minimizer, curvatures*minimizer**2/2, batch_size=batch_size,
                              name=f'reset comparison (N={n_components}, spread={spread:g})')

def hyperparameter_condition(hyper: AdamHyper, inner_length: int, L: float, c: float, G: float) -> bool:
    """
    Evaluate the hyper-parameter hypothesis of the comparison before any run.

    Requires `L·α₂ >= 2√(G²+ε)` and `L/c <= (2β₁-1)/(1-β₁^(m+1))·√(ε/(G²+ε))`.
    """
    eps, beta1 = hyper.epsilon, hyper.beta1
    alpha2 = hyper.schedule(2)

    step_ok = L*alpha2 >= 2*np.sqrt(G**2 + eps)
    ratio_ok = L/c <= (2*beta1 - 1) / (1 - beta1**(inner_length + 1)) * np.sqrt(eps / (G**2 + eps))

    return bool(step_ok and ratio_ok)

def reset_comparison(base_seed: int, problem: ScalarQuadraticSum | None = None, #pylint: disable=too-many-arguments, too-many-locals
                     schedule: Schedule = DEFAULT_RATES, beta1: float = 0.9, beta2: float = 0.999,
                     epsilon: float = 0.6, inner_length: int = 5, G: float = 1.0, w0: float = 0.8) -> ResetReport:
    """
    Run both options from identical seeds for two outer iterations and compare the objective after the first update
    of the second one.

    Args:
        base_seed: The seed of the shared random stream.
        problem: A one-dimensional strongly convex finite sum (`make_reset_problem()` when None).
        schedule: The per-outer-iteration learning rates (only `α₂` enters the hypotheses).
        beta1: The first-moment decay rate.
        beta2: The second-moment decay rate.
        epsilon: The constant under the square root.
        inner_length: The inner loop length `m`.
        G: The bound checked on the realized directions.
        w0: The first snapshot.

    Returns:
        The two objective values and the per-clause hypothesis checks.
    """
    problem = problem or make_reset_problem()
    hyper = AdamHyper(schedule, beta1, beta2, epsilon)
    m = inner_length

    records = {
        option: run_vradam(problem, VradamConfig(hyper, m, problem.batch_size, option), np.array([w0]), 2,
                           RandomSource(base_seed))
        for option in ('A', 'B')
    }
    run_a, run_b = records['A'], records['B']

    # the first `m + 1` directions are shared by both options
    L = c = problem.curvature
    directions = np.abs(run_a.directions[:m + 1, 0])
    clause1 = bool(c > 0 and np.all(directions <= G))
    clause2 = bool(run_a.m_norm[m - 1] >= run_a.snapshot_grad_norm[1])
    clause3 = hyperparameter_condition(hyper, m, L, c, G)

    report = ResetReport(base_seed, problem.loss(run_a.iterates[m]), problem.loss(run_b.iterates[m]),
                         clause1, clause2, clause3)
    logging.debug('Reset comparison #%i: F_A=%.12g F_B=%.12g (clauses %s/%s/%s)', base_seed, report.F_A, report.F_B,
                  clause1, clause2, clause3)

    return report
