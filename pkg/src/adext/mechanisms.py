"""Payment rules and incentive diagnostics.

Pivot-style payments charge each advertiser the welfare its presence costs
the others: P_i = opt(instance without i) - (welfare of others under the
chosen outcome). Run over an exact maximizer this is the classic truthful
scheme; run over an algorithm that exactly maximizes a fixed sub-range of
allocations (odd slots only, or colorful w.r.t. a frozen coloring set) it
stays truthful for the same reason. Prices are quoted per click.

The checkers sweep one agent's bid over a grid and flag profitable lies
(truthfulness) or click-probability drops (monotonicity).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from . import color_coding, dag_dp, greedy_reset, lp_sa, oracle
from .core import Allocation, Instance, eval_ctr, social_welfare

DEFAULT_TOL = 1e-9


class MechanismError(RuntimeError):
    pass


@dataclass(frozen=True)
class MechanismOutcome:
    allocation: Allocation
    payments: np.ndarray
    per_click_prices: np.ndarray

    def utility(self, inst: Instance, agent: int, true_value: float) -> float:
        return eval_ctr(inst, self.allocation, agent) * true_value - float(
            self.payments[agent]
        )


@dataclass(frozen=True)
class MonotonicityReport:
    agent: int
    grid: tuple[float, ...]
    ctrs: tuple[float, ...]
    violations: tuple[tuple[float, float], ...]  # (bid_low, bid_high) with a CTR drop

    @property
    def monotone(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class TruthfulnessReport:
    violations: tuple[tuple[int, float, float], ...]  # (agent, report, utility gain)

    @property
    def truthful(self) -> bool:
        return not self.violations


def with_value(inst: Instance, agent: int, value: float) -> Instance:
    v = inst.v.copy()
    v[agent] = value
    return replace(inst, v=v)


def without_ad(inst: Instance, agent: int) -> Instance:
    keep = [i for i in range(inst.n) if i != agent]
    gamma = (
        inst.gamma[np.ix_(keep, keep)]
        if inst.model.kind == "aa"
        else inst.gamma[:, keep]
    )
    return replace(inst, q=inst.q[keep], v=inst.v[keep], gamma=gamma)


def _outcome(inst: Instance, theta: Allocation, payments: np.ndarray) -> MechanismOutcome:
    prices = np.zeros(inst.n)
    for i in range(inst.n):
        ctr = eval_ctr(inst, theta, i)
        if ctr > 0:
            prices[i] = payments[i] / ctr
        elif abs(payments[i]) > 1e-7:
            raise MechanismError(f"agent {i} charged {payments[i]} with zero CTR")
        else:
            payments[i] = 0.0
    return MechanismOutcome(theta, payments, prices)


def pivot_outcome(inst: Instance, solve_fn: Callable[[Instance], Allocation]) -> MechanismOutcome:
    """Pivot payments around any exact (range-)maximizer ``solve_fn``."""
    theta = solve_fn(inst)
    sw = social_welfare(inst, theta)
    payments = np.zeros(inst.n)
    for i in range(inst.n):
        others = sw - eval_ctr(inst, theta, i) * float(inst.v[i])
        if inst.n == 1:
            opt_wo = 0.0
        else:
            sub = without_ad(inst, i)
            opt_wo = social_welfare(sub, solve_fn(sub))
        payments[i] = opt_wo - others
    return _outcome(inst, theta, payments)


EXACT_SOLVERS: dict[str, Callable[[Instance], Allocation]] = {
    "oracle": lambda inst: oracle.brute_force_optimum(inst).best,
    "dag-dp": dag_dp.dp_optimal_dag,
    "lp": lambda inst: lp_sa.solve_fne_sa(inst).allocation,
}


def vcg_payments(inst: Instance, solver: str = "oracle") -> MechanismOutcome:
    """Truthful payments over the full allocation range.

    ``solver`` must be one of the exact algorithms; anything approximate
    is refused because pivot payments around it would not be truthful.
    """
    if solver not in EXACT_SOLVERS:
        raise MechanismError(
            f"solver {solver!r} is not exact on any instance class; "
            f"choose one of {sorted(EXACT_SOLVERS)}"
        )
    return pivot_outcome(inst, EXACT_SOLVERS[solver])


def mir_payments(
    inst: Instance, range_solver: str = "greedy", seed: int = 0, reps: int = 3
) -> MechanismOutcome:
    """Truthful payments over a fixed sub-range of allocations.

    ``greedy``: the even-slots-empty range (reset model). ``cc``: the best
    allocation over the first K' slots that is colorful under a coloring
    set frozen from ``seed`` - the exact maximum, with no discarding or
    rounding, so the range does not move with the bids.
    """
    if range_solver == "greedy":
        return pivot_outcome(inst, greedy_reset.greedy_half)
    if range_solver == "cc":
        params = color_coding.ApproxParams(delta=0.5, epsilon=0.5, seed=seed, reps=reps)
        kp = params.kprime(inst.n, inst.k)
        colorings = color_coding.fixed_colorings(inst.n, kp, seed, reps)
        theta = color_coding.cc_mir_best(inst, colorings, kp)
        sw = social_welfare(inst, theta)
        payments = np.zeros(inst.n)
        for i in range(inst.n):
            others = sw - eval_ctr(inst, theta, i) * float(inst.v[i])
            if inst.n == 1:
                opt_wo = 0.0
            else:
                # ads keep their frozen colors when one of them is removed
                sub = without_ad(inst, i)
                cols = [np.delete(c, i) for c in colorings]
                opt_wo = social_welfare(sub, color_coding.cc_mir_best(sub, cols, kp))
            payments[i] = opt_wo - others
        return _outcome(inst, theta, payments)
    raise MechanismError(f"unknown range solver {range_solver!r}")


def second_price_single(inst: Instance) -> MechanismOutcome:
    """Single-item second price: best q*v wins the top slot, alone."""
    qv = inst.q * inst.v
    winner = int(np.argmax(qv))  # first maximum = smallest index on ties
    theta = Allocation((winner,) + (-1,) * (inst.k - 1))
    payments = np.zeros(inst.n)
    if inst.n > 1:
        payments[winner] = float(np.max(np.delete(qv, winner)))
    return _outcome(inst, theta, payments)


def check_monotonicity(
    solve_fn: Callable[[Instance], Allocation],
    inst: Instance,
    agent: int,
    grid: Sequence[float],
    tol: float = DEFAULT_TOL,
) -> MonotonicityReport:
    """CTR of ``agent`` as its bid sweeps ``grid`` (ascending), others fixed."""
    grid = tuple(float(b) for b in grid)
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be sorted ascending")
    ctrs = []
    for bid in grid:
        bumped = with_value(inst, agent, bid)
        ctrs.append(eval_ctr(bumped, solve_fn(bumped), agent))
    violations = tuple(
        (grid[t], grid[t + 1])
        for t in range(len(grid) - 1)
        if ctrs[t + 1] < ctrs[t] - tol
    )
    return MonotonicityReport(agent, grid, tuple(ctrs), violations)


def check_truthfulness(
    mechanism_fn: Callable[[Instance], MechanismOutcome],
    inst: Instance,
    report_grid: Sequence[float],
    true_values: Sequence[float] | None = None,
    tol: float = DEFAULT_TOL,
) -> TruthfulnessReport:
    """Flag every (agent, report) whose utility beats the truthful one."""
    truths = inst.v if true_values is None else np.asarray(true_values, dtype=float)
    base = inst if true_values is None else replace(inst, v=truths.copy())
    violations = []
    for agent in range(inst.n):
        honest = mechanism_fn(base).utility(base, agent, float(truths[agent]))
        for report in report_grid:
            outcome = mechanism_fn(with_value(base, agent, float(report)))
            u = outcome.utility(base, agent, float(truths[agent]))
            if u > honest + tol:
                violations.append((agent, float(report), u - honest))
    return TruthfulnessReport(tuple(violations))


def pivot_truthfulness_sweep(
    inst: Instance,
    solve_fn: Callable[[Instance], Allocation],
    report_grid: Sequence[float],
    tol: float = DEFAULT_TOL,
) -> TruthfulnessReport:
    """check_truthfulness for pivot mechanisms, reusing the per-agent pivot.

    The pivot term does not depend on the agent's own report, so it is
    solved once per agent instead of once per (agent, report); results are
    identical to the black-box sweep over ``pivot_outcome``.
    """
    theta_truth = solve_fn(inst)
    sw_truth = social_welfare(inst, theta_truth)
    violations = []
    for agent in range(inst.n):
        v_true = float(inst.v[agent])
        if inst.n == 1:
            opt_wo = 0.0
        else:
            sub = without_ad(inst, agent)
            opt_wo = social_welfare(sub, solve_fn(sub))
        honest = sw_truth - opt_wo  # CTR*v - P collapses to welfare difference
        for report in report_grid:
            bumped = with_value(inst, agent, float(report))
            theta_r = solve_fn(bumped)
            others = social_welfare(bumped, theta_r) - eval_ctr(
                bumped, theta_r, agent
            ) * float(report)
            u = eval_ctr(bumped, theta_r, agent) * v_true - (opt_wo - others)
            if u > honest + tol:
                violations.append((agent, float(report), u - honest))
    return TruthfulnessReport(tuple(violations))
