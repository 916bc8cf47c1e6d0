"""
SPDX-License-Identifier: MIT

The sub-commands of the command-line tool. Each one runs its experiment, writes its CSV files, an optional SVG chart,
a key-value summary and the echoed effective config into `{output_root}/{command}/`, and returns an exit code.
"""

import logging
import os

import numpy as np

from vradam.config.parser import RunConfig, dump_effective_config
from vradam.emitters import AxisConfig, LineSeries, write_csv, write_summary, write_svg
from vradam.experiments.divergence import divergence_experiment, drift_estimate
from vradam.experiments.harness import OptimizerSpec
from vradam.experiments.reset import make_reset_problem, reset_comparison
from vradam.experiments.training import TrainingCurve, best_cell, make_grid, relative_pairs, train_grid
from vradam.optimizers.schedules import LearningRateSchedule, OuterRates, inner_length_grid, schedule_grid
from vradam.optimizers.state import OPTIONS, AdamHyper
from vradam.problems.classification import make_logistic, make_mlp
from vradam.problems.constructions import make_op_delta, make_thm2_problem, make_thm3_problem
from vradam.problems.datasets import load_dataset, make_synthetic_dataset
from vradam.verify.battery import run_battery

DIVERGENCE_COLUMNS = ('t', 'mse_mean', 'mse_stderr', 'drift_mean', 'drift_stderr')
TRAIN_COLUMNS = ('step', 'epoch_equiv', 'wall_clock_s', 'model_cost_units', 'loss', 'grad_norm')
GRID_COLUMNS = ('file', 'algorithm', 'option', 'schedule', 'alpha0', 'gamma', 'inner_length', 'mean_final_loss',
                'min_final_loss', 'max_final_loss', 'failed')
RELATIVE_COLUMNS = ('vradam', 'adam', 'model_cost_units', 'relative')
RESET_COLUMNS = ('seed', 'F_A', 'F_B', 'assumption1_ok', 'assumption2_ok', 'assumption3_ok', 'asserted')

def output_directory(cfg: RunConfig) -> str:
    """
    Create and return `{output_root}/{command}/` with the effective config echoed into it.
    """
    directory = os.path.join(cfg.output_root, cfg.command)
    os.makedirs(directory, exist_ok=True)
    dump_effective_config(cfg, directory)

    return directory

def _divergence_problem(cfg: RunConfig):
    if cfg.problem == 'thm2':
        return make_thm2_problem(cfg.n_components, cfg.batch_size)
    if cfg.problem == 'thm3':
        return make_thm3_problem(cfg.n_components)

    return make_op_delta(cfg.delta)

def cmd_divergence(cfg: RunConfig) -> int:
    """
    Estimate `𝔼[(w_t - w*)²]` and the drift of the configured optimizer and write `divergence.csv`.
    """
    directory = output_directory(cfg)
    problem = _divergence_problem(cfg)

    hyper = AdamHyper(LearningRateSchedule(cfg.schedule, cfg.alpha, cfg.gamma), cfg.beta1, cfg.beta2, cfg.epsilon)
    optimizer = OptimizerSpec(cfg.optimizer, hyper, cfg.inner_length, cfg.batch_size,
                              cfg.option if cfg.optimizer == 'vradam' else None)

    series = divergence_experiment(cfg.delta, cfg.w0, cfg.trials, cfg.steps, cfg.base_seed, optimizer,
                                   problem=None if cfg.problem == 'op' else problem, workers=cfg.workers)

    write_csv(os.path.join(directory, 'divergence.csv'), DIVERGENCE_COLUMNS, zip(
        series.t.tolist(), series.mse_mean, series.mse_stderr, series.drift_mean, series.drift_stderr
    ))

    summary = {
        'command': 'divergence',
        'problem': problem.name,
        'optimizer': series.label,
        'trials': series.trials,
        'failed_trials': series.failed,
        'initial_mse': series.initial_mse,
        'final_mse': series.final_mse,
        'mse_grows': series.final_mse > series.initial_mse,
        'converges': series.final_mse < series.initial_mse,
    }
    if cfg.warmup < series.updates.shape[1]:
        drift = drift_estimate(series.updates, cfg.warmup)
        summary.update({
            'drift_warmup': drift.warmup,
            'drift_mean': drift.mean,
            'drift_low': drift.low,
            'drift_high': drift.high,
            'drift_positive': drift.positive,
        })
    else:
        logging.warning('Warm-up (%i) covers the whole run: no drift estimate', cfg.warmup)

    write_summary(os.path.join(directory, 'summary.txt'), [summary])

    if cfg.svg:
        write_svg(os.path.join(directory, 'divergence.svg'),
                  [LineSeries(series.label, series.t, series.mse_mean)],
                  AxisConfig('t', '𝔼[(w_t - w*)²]', log_y=True, title=problem.name))

    return 0

def _training_problem(cfg: RunConfig):
    if cfg.dataset:
        dataset = load_dataset(cfg.dataset, cfg.format, cfg.label_column, cfg.label_first)
        if dataset.n_samples > cfg.n_samples:
            dataset = dataset.subsample(cfg.n_samples, cfg.base_seed)
    else:
        dataset = make_synthetic_dataset(cfg.n_samples, cfg.n_features, cfg.n_classes, cfg.base_seed)

    if cfg.model == 'mlp':
        return make_mlp(dataset, cfg.hidden, cfg.batch_size, cfg.base_seed)

    return make_logistic(dataset, cfg.l2, cfg.batch_size)

def _cell_file(optimizer: OptimizerSpec) -> str:
    schedule = optimizer.hyper.schedule
    name = f'{optimizer.algorithm}'
    if optimizer.algorithm == 'vradam':
        name += f'-{OPTIONS[optimizer.option]}-m{optimizer.inner_length}'
    name += f'-{schedule.kind}-a{schedule.alpha0:g}'
    if schedule.gamma is not None:
        name += f'-g{schedule.gamma:g}'

    return f'train-{name}.csv'

def _curve_rows(curve: TrainingCurve):
    for step, (epoch, wall, cost, loss, norm) in enumerate(zip(curve.epochs, curve.wall_clock, curve.cost, curve.loss,
                                                                  curve.grad_norm), start=1):
        yield step, epoch, wall, cost, loss, norm

def cmd_train(cfg: RunConfig) -> int: #pylint: disable=too-many-locals
    """
    Train every grid cell under the same budget, then write one curve per cell, `grid.csv` and `relative.csv`.
    """
    directory = output_directory(cfg)
    problem = _training_problem(cfg)

    schedules = schedule_grid(tuple(cfg.schedules), tuple(cfg.alphas), tuple(cfg.gammas))
    inner_lengths = cfg.inner_lengths or inner_length_grid(problem.n_components, cfg.batch_size,
                                                           tuple(cfg.inner_factors))
    cells = make_grid(cfg.optimizers, schedules, inner_lengths, cfg.options, cfg.batch_size, cfg.beta1, cfg.beta2,
                      cfg.epsilon, cfg.bias_correction)
    budget = cfg.epochs * problem.full_gradient_cost

    results = train_grid(problem, cells, budget, cfg.seeds, cfg.base_seed, workers=cfg.workers)

    grid_rows = []
    for result in results:
        file = _cell_file(result.optimizer)
        schedule = result.optimizer.hyper.schedule
        if result.curves:
            write_csv(os.path.join(directory, file), TRAIN_COLUMNS, _curve_rows(result.mean_curve()))
        grid_rows.append((
            file, result.optimizer.algorithm, result.optimizer.option or '', schedule.kind, schedule.alpha0,
            schedule.gamma if schedule.gamma is not None else '', result.optimizer.inner_length,
            result.mean_final_loss, result.min_final_loss if result.curves else '',
            result.max_final_loss if result.curves else '', result.failed,
        ))
    write_csv(os.path.join(directory, 'grid.csv'), GRID_COLUMNS, grid_rows)

    pairs = relative_pairs(results)
    relative_rows = (
        (_cell_file(vradam.optimizer), _cell_file(adam.optimizer), cost, value)
        for vradam, adam, axis, relative in pairs for cost, value in zip(axis, relative)
    )
    write_csv(os.path.join(directory, 'relative.csv'), RELATIVE_COLUMNS, relative_rows)

    summary = {'command': 'train', 'problem': problem.name, 'budget_cost_units': budget, 'cells': len(results)}
    best = {}
    for key, algorithm, option in (('adam', 'adam', None), ('vradam_reset', 'vradam', 'A'),
                                   ('vradam_no_reset', 'vradam', 'B')):
        try:
            best[key] = best_cell(results, algorithm, option)
        except ValueError:
            continue
        summary[f'best_{key}'] = best[key].optimizer.label
        summary[f'best_{key}_final_loss'] = best[key].mean_final_loss

    vradam_keys = [key for key in ('vradam_reset', 'vradam_no_reset') if key in best]
    if 'adam' in best and vradam_keys:
        vradam_best = min((best[key] for key in vradam_keys), key=lambda result: result.mean_final_loss)
        gap = abs(vradam_best.mean_final_loss - best['adam'].mean_final_loss) / abs(best['adam'].mean_final_loss)
        summary['relative_gap'] = gap
        summary['within_band'] = gap <= cfg.band
    if 'vradam_reset' in best and 'vradam_no_reset' in best:
        reset, no_reset = best['vradam_reset'].mean_final_loss, best['vradam_no_reset'].mean_final_loss
        summary['reset_gap'] = (reset - no_reset) / abs(no_reset)
        summary['reset_not_worse'] = reset <= no_reset + cfg.reset_band*abs(no_reset)

    write_summary(os.path.join(directory, 'summary.txt'), [summary])

    if cfg.svg and pairs:
        write_svg(os.path.join(directory, 'relative.svg'),
                  [LineSeries(vradam.optimizer.label, axis, relative) for vradam, _, axis, relative in pairs],
                  AxisConfig('model cost units', '(VRADAM - ADAM)/ADAM', title=problem.name))

    return 0

def cmd_verify(cfg: RunConfig) -> int:
    """
    Run the oracle battery and write `verify_report.txt`; exit 0 iff every check is as expected.
    """
    directory = output_directory(cfg)
    reports = run_battery(cfg.only, cfg.negative_controls, cfg.base_seed)

    write_summary(os.path.join(directory, 'verify_report.txt'), [report.as_summary() for report in reports])

    failed = [report for report in reports if not report.ok]
    for report in failed:
        logging.error('Check "%s" failed on %s (violation %.6g > %.6g)', report.check, report.instance,
                      report.max_violation, report.tolerance)

    return 1 if failed else 0

def cmd_reset_compare(cfg: RunConfig) -> int:
    """
    Compare Option A and Option B over `seeds` seeds and write `reset_compare.csv`; exit 1 if an asserted comparison
    does not hold.
    """
    directory = output_directory(cfg)
    problem = make_reset_problem(cfg.spread, cfg.n_components, cfg.batch_size, cfg.base_seed)
    schedule = OuterRates(tuple(cfg.rates))

    reports = [
        reset_comparison(seed, problem, schedule, cfg.beta1, cfg.beta2, cfg.epsilon, cfg.inner_length, cfg.G, cfg.w0)
        for seed in range(cfg.base_seed, cfg.base_seed + cfg.seeds)
    ]

    def _flag(value: bool) -> str:
        return 'true' if value else 'false'

    write_csv(os.path.join(directory, 'reset_compare.csv'), RESET_COLUMNS, (
        (report.seed, report.F_A, report.F_B, _flag(report.clause1_ok), _flag(report.clause2_ok),
         _flag(report.clause3_ok), _flag(report.asserted))
        for report in reports
    ))

    asserted = [report for report in reports if report.asserted]
    violations = [report for report in asserted if not report.holds()]
    write_summary(os.path.join(directory, 'summary.txt'), [{
        'command': 'reset_compare',
        'problem': problem.name,
        'seeds': len(reports),
        'asserted': len(asserted),
        'violations': len(violations),
        'mean_F_A': float(np.mean([report.F_A for report in reports])),
        'mean_F_B': float(np.mean([report.F_B for report in reports])),
        'passed': not violations,
    }])

    if not asserted:
        logging.warning('No seed satisfied every hypothesis: the comparison is reported but never asserted')
    for report in violations:
        logging.error('Seed %i: F_B=%.12g < F_A=%.12g with every hypothesis satisfied', report.seed, report.F_B,
                      report.F_A)

    return 1 if violations else 0

COMMAND_FUNCTIONS = {
    'divergence': cmd_divergence,
    'train': cmd_train,
    'verify': cmd_verify,
    'reset_compare': cmd_reset_compare,
}
