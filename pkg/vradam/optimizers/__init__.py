"""
SPDX-License-Identifier: MIT

General ADAM, VRADAM (Options A and B) and the SGD baseline, all emitting per-step telemetry.
"""

from vradam.optimizers.adam import adam_step, run_general_adam, run_sgd
from vradam.optimizers.schedules import ALPHA_GRID, GAMMA_GRID, INNER_LENGTH_FACTORS, SCHEDULE_KINDS
from vradam.optimizers.schedules import LearningRateSchedule, OuterRates, Schedule, inner_length_grid, schedule_grid
from vradam.optimizers.state import OPTIONS, AdamHyper, AdamState, RunRecord, VradamConfig
from vradam.optimizers.variance_reduced import bias_correct, run_vradam, vradam_inner_direction
