"""Exhaustive ground-truth solver for desk-scale instances.

Enumerates every feasible assignment of ads (and, optionally, empty slots)
to the K positions and keeps the welfare maximum. Deliberately free of
pruning: every other solver in the package is validated against this one.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Allocation, Instance
from .kernels import decode_allocation, search_best

DEFAULT_CAP = 10_000_000


class OracleCapError(RuntimeError):
    """Search space exceeds the enumeration cap."""


@dataclass(frozen=True)
class OracleResult:
    best: Allocation
    value: float
    count: int


def brute_force_optimum(
    inst: Instance, allow_bot: bool = True, cap: int = DEFAULT_CAP
) -> OracleResult:
    """Welfare-optimal allocation by full enumeration.

    Ties break to the lexicographically smallest slot sequence, ordering
    real ads by index and the empty slot after all of them. ``allow_bot``
    may be switched off for no-reset instances with N >= K, where filling
    every slot is weakly optimal.
    """
    space = (inst.n + 1) ** inst.k if allow_bot else inst.n**inst.k
    if space > cap:
        raise OracleCapError(
            f"instance too large for oracle: {space} sequences exceed cap {cap}"
        )
    if not allow_bot and inst.n < inst.k:
        raise ValueError("allow_bot=False needs at least as many ads as slots")
    digits, value, count = search_best(inst, allow_bot)
    return OracleResult(best=decode_allocation(inst, digits), value=float(value), count=count)
