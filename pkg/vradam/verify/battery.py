"""
SPDX-License-Identifier: MIT

The oracle and invariant battery run by `python -m vradam verify`.

Each check builds its own small instances from a fixed seed, so the battery is reproducible and runs at desk scale.
Negative controls corrupt an input on purpose: they are reported alongside and expected to fail.
"""

import logging
from collections.abc import Callable, Iterable

import numpy as np

from vradam.numerics import RandomSource
from vradam.optimizers.adam import run_general_adam
from vradam.optimizers.schedules import LearningRateSchedule
from vradam.optimizers.state import AdamHyper, VradamConfig
from vradam.optimizers.variance_reduced import run_vradam
from vradam.problems.classification import make_logistic, make_mlp
from vradam.problems.constructions import make_op_delta, make_thm2_problem, make_thm3_problem
from vradam.problems.datasets import make_synthetic_dataset
from vradam.problems.quadratic import make_quadratic
from vradam.verify.bounds import check_step_bound, realized_gradient_bound, sweep_state_bounds, visited_points
from vradam.verify.oracles import audit_gradients, check_construction_equivalence, check_unbiasedness
from vradam.verify.reports import OracleReport

Check = Callable[[RandomSource, bool], list[OracleReport]]

# Exhaustive batch enumeration stays cheap up to this many components
MAX_COMPONENTS = 12

def _constructions() -> list:
    problems = [make_thm2_problem(n, b) for n in range(2, MAX_COMPONENTS + 1) for b in range(1, n)]
    return problems + [make_thm3_problem(n) for n in range(5, MAX_COMPONENTS + 1)]

def _unbiasedness(rng: RandomSource, _negative_controls: bool) -> list[OracleReport]:
    problems = _constructions() + [
        make_quadratic(0.5, 1.0, 3, noise=1.0, clip=10.0, n_components=6, batch_size=3, seed=rng.seed),
    ]

    return [check_unbiasedness(problem, rng, points=50, scale=0.5) for problem in problems]

def _construction(rng: RandomSource, negative_controls: bool) -> list[OracleReport]:
    reports = [
        check_construction_equivalence(problem, problem.delta, rng, points=50) for problem in _constructions()
    ]

    if negative_controls:
        problem = make_thm2_problem(10, 1)
        corrupted = problem.with_slope(9, problem.slopes[9] + 1.0)
        corrupted.name = f'{problem.name} with a corrupted last component'
        reports.append(check_construction_equivalence(corrupted, problem.delta, rng, points=20).control())

    return reports

def _state_bounds(rng: RandomSource, negative_controls: bool) -> list[OracleReport]:
    hyper = AdamHyper(LearningRateSchedule('constant', 0.01))
    op = make_op_delta(10)
    op_record = run_vradam(op, VradamConfig(hyper, 32, 1, 'A'), np.array([-80.0]), 10, rng.spawn(rng.stream_id + 1))
    op_bound = realized_gradient_bound(op, visited_points(op_record))

    quadratic = make_quadratic(0.5, 1.0, 5, noise=0.0, clip=10.0, seed=rng.seed)
    quadratic_record = run_vradam(quadratic, VradamConfig(AdamHyper(LearningRateSchedule('inv_t', 0.5)), 10, 1, 'A'),
                                  quadratic.initial_point(), 10, rng.spawn(rng.stream_id + 2))

    reports = [sweep_state_bounds(op_record, op_bound), sweep_state_bounds(quadratic_record, quadratic.G_bound)]
    if negative_controls:
        # G understated to a sixth of the largest realized ‖m‖: the first moment ratio is exactly 2
        understated = float(np.max(op_record.m_norm[:op_record.steps])) / 6
        reports.append(sweep_state_bounds(op_record, understated).control())

    return reports

def _gradient_audit(rng: RandomSource, _negative_controls: bool) -> list[OracleReport]:
    dataset = make_synthetic_dataset(200, 4, 3, seed=rng.seed)
    quadratic = make_quadratic(0.5, 1.0, 5, noise=0.1, clip=10.0, seed=rng.seed)

    return [
        audit_gradients(make_logistic(dataset, l2=1e-3), 3, 1e-6, rng, tol=1e-5),
        audit_gradients(make_mlp(dataset, 5, seed=rng.seed), 3, 1e-6, rng, tol=1e-4, scale=0.1),
        audit_gradients(quadratic, 3, 1e-4, rng, tol=1e-7, scale=0.1),
    ]

def _step_bound(rng: RandomSource, negative_controls: bool) -> list[OracleReport]:
    proof_regime = AdamHyper(LearningRateSchedule('constant', 0.001), beta1=0.0, beta2=0.999, epsilon=1e-12)
    record = run_general_adam(make_op_delta(10), proof_regime, np.array([-100.0]), 2000, rng.spawn(rng.stream_id + 3))

    practical = AdamHyper(LearningRateSchedule('inv_t', 0.01), bias_correction=True)
    quadratic = make_quadratic(0.5, 1.0, 5, noise=1.0, clip=10.0, seed=rng.seed)
    practical_record = run_general_adam(quadratic, practical, quadratic.initial_point(), 500,
                                        rng.spawn(rng.stream_id + 4))

    reports = [check_step_bound(record, proof_regime), check_step_bound(practical_record, practical)]
    if negative_controls:
        understated = AdamHyper(LearningRateSchedule('constant', 0.001/100), beta1=0.0, beta2=0.999, epsilon=1e-12)
        reports.append(check_step_bound(record, understated).control())

    return reports

CHECKS: dict[str, Check] = {
    'unbiasedness': _unbiasedness,
    'construction': _construction,
    'state-bounds': _state_bounds,
    'gradient-audit': _gradient_audit,
    'step-bound': _step_bound,
}

def run_battery(only: Iterable[str] | None = None, negative_controls: bool = False,
                base_seed: int = 0) -> list[OracleReport]:
    """
    Run the battery, or the checks named in `only`.

    Args:
        only: The check names to run (all of `CHECKS` when None).
        negative_controls: Also run the corrupted instances, which are expected to fail.
        base_seed: The seed of the instances and of the random points.

    Returns:
        Every report, in check order.

    Raises:
        ValueError: If an unknown check is named.
    """
    names = list(CHECKS) if only is None else list(only)
    unknown = [name for name in names if name not in CHECKS]
    if unknown:
        raise ValueError(f'Unknown check(s) {unknown}: must be among {list(CHECKS)}')

    reports = []
    for stream, name in enumerate(names):
        logging.info('Running the "%s" check...', name)
        check_reports = CHECKS[name](RandomSource(base_seed, stream), negative_controls)
        for report in check_reports:
            level = logging.INFO if report.ok else logging.ERROR
            logging.log(level, '%s on %s: violation %.6g (tolerance %.6g)%s', report.check, report.instance,
                        report.max_violation, report.tolerance, ' [negative control]' if report.expected_failure else '')
        reports.extend(check_reports)

    failed = [report for report in reports if not report.ok]
    if failed:
        logging.error('%i/%i checks failed, first: %s on %s', len(failed), len(reports), failed[0].check,
                      failed[0].instance)
    else:
        logging.info('%i checks done [SUCCESS]', len(reports))

    return reports
