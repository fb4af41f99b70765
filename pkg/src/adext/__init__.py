"""Welfare maximization for sponsored-search allocations with externalities."""

from .backend import BACKEND
from .core import (
    BOT,
    Allocation,
    Instance,
    ModelSpec,
    allocation_from_ads,
    eval_ctr,
    prune_zero_pairs,
    social_welfare,
    validate_instance,
)
from .oracle import OracleResult, brute_force_optimum

__all__ = [
    "BACKEND",
    "BOT",
    "Allocation",
    "Instance",
    "ModelSpec",
    "OracleResult",
    "allocation_from_ads",
    "brute_force_optimum",
    "eval_ctr",
    "prune_zero_pairs",
    "social_welfare",
    "validate_instance",
]
