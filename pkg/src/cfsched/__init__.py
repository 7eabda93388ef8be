"""Compute-and-forward rates, coefficient search and user scheduling for large relay networks."""

from .bounds import (
    outage_estimate,
    p_interval,
    pr_xi_lower,
    rate_lb_theorem5,
    reg_inc_beta,
    sumrate_ub_theorem7,
    u_delta,
    unit_pref_bound_beta,
    unit_pref_bound_exp,
)
from .errors import (
    BoundDomainError,
    ConfigError,
    InvalidInputError,
    NotSolvableError,
    NumericError,
    ResourceLimitError,
)
from .linalg import DecodingMatrix, rank_int, rank_mod2, solve_exact
from .rate import alpha_mmse, computation_rate, gram_matrix, quad_form, rate_upper_bound
from .scheduler import SchedParams, SessionResult, SlotSchedule, choose_k, lift, run_session, schedule_slot
from .search import best_coeff, best_coeff_bruteforce, enumerate_candidates, sign_match

__version__ = "0.1.0"
