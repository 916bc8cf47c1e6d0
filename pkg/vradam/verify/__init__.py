"""
SPDX-License-Identifier: MIT

Independent oracles: brute-force batch enumeration, construction equivalence, analytic bound sweeps and
finite-difference gradient audits.
"""

from vradam.verify.battery import CHECKS, run_battery
from vradam.verify.bounds import check_step_bound, realized_gradient_bound, step_bound, sweep_state_bounds
from vradam.verify.bounds import visited_points
from vradam.verify.oracles import ENUMERATION_CAP, audit_gradients, check_construction_equivalence, check_unbiasedness
from vradam.verify.oracles import enumerate_batches_expectation
from vradam.verify.reports import OracleReport
