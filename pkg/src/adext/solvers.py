"""Name-keyed access to every allocation algorithm, for the CLI and bench."""

from __future__ import annotations

import math
from typing import Callable

from . import color_coding, dag_dp, greedy_reset, lp_sa, mechanisms, oracle, w3sp
from .core import Allocation, Instance

ALGORITHMS = (
    "oracle",
    "lp",
    "dag-dp",
    "cc",
    "cc-exact",
    "greedy-r",
    "w3sp",
    "second-price",
)


def get_solver(name: str, **opts) -> Callable[[Instance], Allocation]:
    """Solver callable for ``name``; unknown names raise KeyError.

    Recognized options (ignored where not applicable): ``seed``, ``reps``,
    ``delta``, ``epsilon``, ``packing``, ``allow_bot``, ``cap``.
    """
    seed = opts.get("seed", 0)
    reps = opts.get("reps", 3)
    if name == "oracle":
        allow_bot = opts.get("allow_bot", True)
        cap = opts.get("cap", oracle.DEFAULT_CAP)
        return lambda inst: oracle.brute_force_optimum(inst, allow_bot=allow_bot, cap=cap).best
    if name == "lp":
        return lambda inst: lp_sa.solve_fne_sa(inst, seed=seed).allocation
    if name == "dag-dp":
        return dag_dp.dp_optimal_dag
    if name == "cc":
        params = color_coding.ApproxParams(
            delta=opts.get("delta", 0.1),
            epsilon=opts.get("epsilon", 0.1),
            seed=seed,
            reps=reps,
        )
        return lambda inst: color_coding.cc_approx(inst, params)
    if name == "cc-exact":
        return lambda inst: color_coding.cc_exact(inst, seed=seed, reps=reps)
    if name == "greedy-r":
        return greedy_reset.greedy_half
    if name == "w3sp":
        packing = opts.get("packing", "greedy")
        return lambda inst: w3sp.allocate_via_w3sp(inst, method=packing)
    if name == "second-price":
        return lambda inst: mechanisms.second_price_single(inst).allocation
    raise KeyError(f"unknown algorithm {name!r} (choose from {ALGORITHMS})")


def theoretical_bound(name: str, inst: Instance, **opts) -> float:
    """Worst-case welfare ratio the algorithm guarantees on this instance.

    Exact algorithms guarantee 1. The color-coding pipeline's published
    ratio applies in the regime where truncation to K' slots is active;
    the exact-mode guarantee is probabilistic, so its deterministic bound
    here is 0.
    """
    if name in ("oracle", "lp", "dag-dp"):
        return 1.0
    if name == "cc-exact":
        return 0.0
    if name == "cc":
        delta = opts.get("delta", 0.1)
        epsilon = opts.get("epsilon", 0.1)
        if inst.n <= 1:
            return 0.0
        return (
            (1 - delta)
            * (1 - epsilon)
            * math.log2(inst.n)
            / (2 * min(inst.n, inst.k))
        )
    if name == "greedy-r":
        return 0.5
    if name == "w3sp":
        gmin = w3sp.min_offdiag_gamma(inst)
        return gmin**inst.window / 3.0
    if name == "second-price":
        return 1.0 / inst.k
    raise KeyError(f"unknown algorithm {name!r}")
