"""
SPDX-License-Identifier: MIT

Argument parsing and checking for the main script.
"""

import argparse

from vradam.experiments.harness import ALGORITHMS
from vradam.optimizers.schedules import SCHEDULE_KINDS
from vradam.optimizers.state import OPTIONS
from vradam.verify.battery import CHECKS

def check_positive_int(arg: str) -> int:
    """
    Convert an argument to a strictly positive integer.

    Raises:
        ArgumentTypeError: If the argument is not an integer or not positive.
    """
    try:
        value = int(arg)
    except ValueError as error:
        raise argparse.ArgumentTypeError(f'Invalid value: "{arg}" is not an integer') from error

    if value < 1:
        raise argparse.ArgumentTypeError(f'Invalid value: {value} must be a positive integer')

    return value

def check_positive_float(arg: str) -> float:
    """
    Convert an argument to a strictly positive real.

    Raises:
        ArgumentTypeError: If the argument is not a number or not positive.
    """
    try:
        value = float(arg)
    except ValueError as error:
        raise argparse.ArgumentTypeError(f'Invalid value: "{arg}" is not a number') from error

    if not value > 0:
        raise argparse.ArgumentTypeError(f'Invalid value: {value} must be positive')

    return value

def check_gamma(arg: str) -> float:
    """
    Convert an argument to an exponential decay factor `γ`, which must lie strictly between 0 and 1.

    Raises:
        ArgumentTypeError: If the argument is not a number in (0, 1).
    """
    try:
        value = float(arg)
    except ValueError as error:
        raise argparse.ArgumentTypeError(f'Invalid decay factor: "{arg}" is not a number') from error

    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f'Invalid decay factor: γ={value} must lie in (0, 1)')

    return value

def check_decay_rate(arg: str) -> float:
    """
    Convert an argument to a moment decay rate `β`, in [0, 1).

    Raises:
        ArgumentTypeError: If the argument is not a number in [0, 1).
    """
    try:
        value = float(arg)
    except ValueError as error:
        raise argparse.ArgumentTypeError(f'Invalid decay rate: "{arg}" is not a number') from error

    if not 0 <= value < 1:
        raise argparse.ArgumentTypeError(f'Invalid decay rate: β={value} must lie in [0, 1)')

    return value

def _add_optimizer_arguments(parser: argparse.ArgumentParser, grid: bool = False) -> None:
    option_help = 'VRADAM option: A (reset the moments every outer iteration) or B (carry them over)'
    if grid:
        parser.add_argument('--optimizer', choices=ALGORITHMS, dest='optimizers',
                            type=str, help='restrict the grid to one optimizer')
        parser.add_argument('--option', choices=list(OPTIONS), dest='options', help=option_help)
        parser.add_argument('--schedule', choices=SCHEDULE_KINDS, dest='schedules',
                            help='restrict the grid to one learning rate schedule')
        parser.add_argument('--alpha', type=check_positive_float, dest='alphas',
                            help='restrict the grid to one initial learning rate α₀')
        parser.add_argument('--gamma', type=check_gamma, dest='gammas',
                            help='restrict the grid to one decay factor γ of the exponential schedule')
        parser.add_argument('--inner-length', type=check_positive_int, dest='inner_lengths',
                            help='restrict the grid to one VRADAM inner loop length m')
    else:
        parser.add_argument('--optimizer', choices=ALGORITHMS, help='optimizer run by every trial')
        parser.add_argument('--option', choices=list(OPTIONS), help=option_help)
        parser.add_argument('--schedule', choices=SCHEDULE_KINDS, help='learning rate schedule')
        parser.add_argument('--alpha', type=check_positive_float, help='initial learning rate α₀')
        parser.add_argument('--gamma', type=check_gamma, help='decay factor γ of the exponential schedule')
        parser.add_argument('--inner-length', type=check_positive_int, help='VRADAM inner loop length m')

    parser.add_argument('--beta1', type=check_decay_rate, help='first moment decay rate β₁')
    parser.add_argument('--beta2', type=check_decay_rate, help='second moment decay rate β₂')
    parser.add_argument('--epsilon', type=check_positive_float, help='constant ε added under the square root')

def build_parser() -> argparse.ArgumentParser:
    """
    Setup the command line interface.

    Flags left unset default to `None` so that the config file value is kept.
    """
    arg_parser = argparse.ArgumentParser(
        prog='vradam',
        description='Reproduce the divergence of stochastic ADAM and the convergence of variance-reduced ADAM.',
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    arg_parser.add_argument('-c', '--config', type=str, default='vradam/sample.config.hjson',
                            help='config file path in HJSON or JSON format')
    arg_parser.add_argument('-o', '--output-root', type=str,
                            help='root directory of the outputs (overrides the config and VRADAM_OUTPUT_ROOT)')
    arg_parser.add_argument('-s', '--base-seed', type=int, help='base seed of every random stream')
    arg_parser.add_argument('-w', '--workers', type=check_positive_int, help='size of the worker pool')
    arg_parser.add_argument('--no-svg', dest='svg', action='store_const', const=False,
                            help='don\'t emit SVG line charts')
    arg_parser.add_argument('-l', '--log', nargs='?', type=str, const=None, default='logs/{datetime}.log',
                            help='log debug information to log file (can specify the full path)')
    arg_parser.add_argument('-q', '--quiet', action='store_true',
                            help='disable console logging')
    arg_parser.add_argument('--overwrite-log', action='store_true',
                            help='overwrite log file, erasing its content (default is to append)')

    commands = arg_parser.add_subparsers(dest='command', required=True)

    divergence = commands.add_parser('divergence', help='estimate 𝔼[(w_t - w*)²] and the drift over seeded trials',
                                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    divergence.add_argument('--problem', choices=['op', 'thm2', 'thm3'],
                            help='two-branch problem, or one of its finite-sum constructions')
    divergence.add_argument('--delta', type=check_positive_float, help='parameter δ > 1 of the two-branch problem')
    divergence.add_argument('--n-components', type=check_positive_int, help='number of components N')
    divergence.add_argument('--batch-size', type=check_positive_int, help='mini-batch size b')
    divergence.add_argument('--w0', type=float, help='starting point')
    divergence.add_argument('--trials', type=check_positive_int, help='number of Monte-Carlo trials')
    divergence.add_argument('--steps', type=check_positive_int, help='number of steps of each trial')
    divergence.add_argument('--warmup', type=int, help='leading steps discarded by the drift estimate')
    _add_optimizer_arguments(divergence)

    train = commands.add_parser('train', help='grid-search training of VRADAM against ADAM on a classification task',
                                formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    train.add_argument('--dataset', type=str, help='CSV or LIBSVM dataset file (synthetic data when unset)')
    train.add_argument('--format', choices=['csv', 'libsvm'], help='dataset file format')
    train.add_argument('--model', choices=['logistic', 'mlp'], help='classification model')
    train.add_argument('--batch-size', type=check_positive_int, help='mini-batch size b')
    train.add_argument('--epochs', type=check_positive_float, help='compute budget, in passes over the data')
    train.add_argument('--seeds', type=check_positive_int, help='number of seeds per grid cell')
    _add_optimizer_arguments(train, grid=True)

    verify = commands.add_parser('verify', help='run the oracle and invariant battery',
                                 formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    verify.add_argument('--only', choices=list(CHECKS), action='append',
                        help='run this check only (can be repeated)')
    verify.add_argument('--negative-controls', action='store_const', const=True,
                        help='also run corrupted instances, which must fail')

    reset = commands.add_parser('reset-compare', help='compare Option A and Option B on their first update of t=2',
                                formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    reset.add_argument('--seeds', type=check_positive_int, help='number of seeds')
    reset.add_argument('--beta1', type=check_decay_rate, help='first moment decay rate β₁')
    reset.add_argument('--epsilon', type=check_positive_float, help='constant ε added under the square root')
    reset.add_argument('--inner-length', type=check_positive_int, help='inner loop length m')
    reset.add_argument('--rates', type=check_positive_float, nargs='+', help='learning rate of each outer iteration')
    reset.add_argument('--spread', type=float, help='spread of the component curvatures (0 for zero variance)')
    reset.add_argument('--w0', type=float, help='first snapshot')

    return arg_parser

def parse_arguments(argv: list[str] | None = None) -> argparse.Namespace:
    """
    Parse the command line.

    Args:
        argv: The arguments to parse (`sys.argv[1:]` when None).

    Returns:
        A `Namespace` object containing the parsed arguments.
    """
    args = build_parser().parse_args(argv)
    for key in ('optimizers', 'options', 'schedules', 'alphas', 'gammas', 'inner_lengths'):
        # single-valued grid restrictions become one-element lists
        if getattr(args, key, None) is not None:
            setattr(args, key, [getattr(args, key)])

    return args

# Namespace entries that are not configuration keys
NON_CONFIG_ARGUMENTS = ('config', 'log', 'quiet', 'overwrite_log', 'command')

def config_overrides(args: argparse.Namespace) -> dict:
    """
    Return the configuration keys set on the command line.
    """
    return {key: value for key, value in vars(args).items() if key not in NON_CONFIG_ARGUMENTS}
