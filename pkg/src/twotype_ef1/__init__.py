"""Welfare-maximizing EF1 allocation for agents of two types, in exact arithmetic."""

from .approx_n import approx1
from .core import (
    Instance,
    InstanceError,
    InvariantViolation,
    build_preference_order,
    is_complete,
    is_ef1,
    social_welfare,
)
from .oracle import brute_force_opt_ef1, gen_random, gen_tightness_norm, gen_tightness_unnorm
from .three_norm import solve_three_norm
from .three_unnorm import solve_three_unnorm

__all__ = [
    "Instance",
    "InstanceError",
    "InvariantViolation",
    "approx1",
    "brute_force_opt_ef1",
    "build_preference_order",
    "gen_random",
    "gen_tightness_norm",
    "gen_tightness_unnorm",
    "is_complete",
    "is_ef1",
    "social_welfare",
    "solve_three_norm",
    "solve_three_unnorm",
]
