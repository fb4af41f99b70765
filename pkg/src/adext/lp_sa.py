"""Exact solver for the slot-ad externality model via a layered LP.

The allocation problem is written as an assignment-style LP: one variable
per (slot, placed content, window of preceding contents), flow rows tying
consecutive slots together, and an at-most-once row per ad. The program
is solved exactly in rational arithmetic and an integral allocation worth
exactly the LP optimum is read out of the solution, first by walking the
support as a distribution over allocations, then (if the optimal basis is
too tangled for that) by an exact pinned-LP dive.

The relaxation is *usually* integral but provably not always: on a small
share of instances the fractional optimum strictly exceeds every
allocation, because two support paths can share one ad at half mass each
while the at-most-once row only sees their sum. Those instances are
detected and refused with :class:`IntegralityError`; regression tests
carry certified examples of both the strict gap and the
tangled-but-integral basis.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from . import _simplex
from ._simplex import EQ, LE, R0, rat
from .core import BOT, Allocation, Instance, ModelError

RETRY_BUDGET = 64


class IntegralityError(RuntimeError):
    """No integral allocation achieves the fractional optimum (certified
    relaxation gap), or the search budget ran out before deciding."""


@dataclass(frozen=True)
class LpVar:
    """Content ``ad`` in (0-based) ``slot`` below the window ``preds``.

    ``preds`` lists the contents of the slots directly above, nearest
    first, truncated to the externality window. ``ad`` is an ad index or
    BOT (reset models only).
    """

    slot: int
    ad: int
    preds: tuple[int, ...]


@dataclass
class LpModel:
    inst: Instance
    vars: list[LpVar]
    objective: list  # rational coefficient per variable
    rows: list[tuple[dict[int, object], str, object]]

    @property
    def nvars(self) -> int:
        return len(self.vars)


@dataclass(frozen=True)
class FractionalSolution:
    """Optimal LP point: nonzero variable values plus the exact objective."""

    values: dict[LpVar, object]
    objective_value: object

    def value(self, var: LpVar):
        return self.values.get(var, R0)


def sw_exact(inst: Instance, theta: Allocation):
    """Social welfare as an exact rational (floats convert losslessly)."""
    c = inst.window
    total = R0
    for pos, ad in enumerate(theta.slots):
        if ad == BOT:
            continue
        g = rat(float(inst.lam_cum[pos])) if inst.model.kind == "aa" else rat(1)
        if inst.model.kind == "aa":
            for l in range(max(0, pos - c), pos):
                g *= rat(inst.pair_gamma(theta.slots[l], theta.slots[l + 1]))
        else:
            for m in range(max(0, pos - c), pos):
                g *= rat(inst.slot_gamma(m, theta.slots[m]))
        total += rat(float(inst.q[ad])) * g * rat(float(inst.v[ad]))
    return total


def _contents(inst: Instance) -> list[int]:
    alphabet = list(range(inst.n))
    if inst.reset:
        alphabet.append(BOT)
    return alphabet


def _tuples(alphabet: list[int], length: int) -> Iterable[tuple[int, ...]]:
    """All content windows of ``length`` with pairwise-distinct real ads."""
    if length == 0:
        yield ()
        return
    for head in alphabet:
        for rest in _tuples(alphabet, length - 1):
            if head != BOT and head in rest:
                continue
            yield (head,) + rest


def build_lp(inst: Instance) -> LpModel:
    """Assemble the layered LP for an sa instance.

    Constraint rows: one "at most once" row per real ad, one flow row per
    realized window state between consecutive slots, and the top-slot
    normalization. Per-slot coverage of the remaining slots is implied by
    flow conservation and therefore not added.
    """
    if inst.model.kind != "sa":
        raise ModelError("LP formulation applies to sa instances")
    if not inst.reset and inst.n < inst.k:
        raise ModelError("no-reset LP needs at least as many ads as slots")

    alphabet = _contents(inst)
    c = inst.window
    variables: list[LpVar] = []
    objective = []
    for s in range(inst.k):
        w = min(c, s)
        for preds in _tuples(alphabet, w):
            for ad in alphabet:
                if ad != BOT and ad in preds:
                    continue
                variables.append(LpVar(s, ad, preds))
                if ad == BOT:
                    objective.append(R0)
                else:
                    coef = rat(float(inst.q[ad])) * rat(float(inst.v[ad]))
                    for l, p in enumerate(preds, start=1):
                        coef *= rat(inst.slot_gamma(s - l, p))
                    objective.append(coef)

    index = {var: j for j, var in enumerate(variables)}
    rows: list[tuple[dict[int, object], str, object]] = []
    for ad in range(inst.n):
        cols = {index[var]: 1 for var in variables if var.ad == ad}
        rows.append((cols, LE, 1))
    rows.append(({index[var]: 1 for var in variables if var.slot == 0}, EQ, 1))
    for s in range(inst.k - 1):
        w_next = min(c, s + 1)
        states: dict[tuple[int, ...], tuple[list[int], list[int]]] = {}
        for var in variables:
            if var.slot == s:
                state = ((var.ad,) + var.preds)[:w_next]
                states.setdefault(state, ([], []))[0].append(index[var])
            elif var.slot == s + 1:
                states.setdefault(var.preds, ([], []))[1].append(index[var])
        for state in sorted(states):
            outgoing, incoming = states[state]
            cols = {j: 1 for j in outgoing}
            for j in incoming:
                cols[j] = cols.get(j, 0) - 1
            rows.append((cols, EQ, 0))
    return LpModel(inst=inst, vars=variables, objective=objective, rows=rows)


def solve_lp(model: LpModel) -> FractionalSolution:
    """Optimal basic feasible solution of the relaxation, exactly."""
    try:
        value, x = _simplex.solve_max(model.objective, model.rows, model.nvars)
    except _simplex.Infeasible as exc:  # construction bug, not a data condition
        raise ModelError(f"LP infeasible: {exc}") from exc
    values = {var: xi for var, xi in zip(model.vars, x) if xi != 0}
    return FractionalSolution(values=values, objective_value=value)


def _transition_tables(frac: FractionalSolution):
    first: list[tuple[LpVar, object]] = []
    trans: dict[tuple[int, tuple[int, ...]], list[tuple[LpVar, object]]] = {}
    for var, val in frac.values.items():
        if var.slot == 0:
            first.append((var, val))
        else:
            trans.setdefault((var.slot, var.preds), []).append((var, val))
    first.sort(key=lambda it: (it[0].ad == BOT, it[0].ad))
    for lst in trans.values():
        lst.sort(key=lambda it: (it[0].ad == BOT, it[0].ad))
    return first, trans


def _draw(rng: random.Random, options: list[tuple[LpVar, object]]) -> LpVar | None:
    total = sum(float(v) for _, v in options)
    if total <= 0:
        return None
    u = rng.random() * total
    acc = 0.0
    for var, val in options:
        acc += float(val)
        if u <= acc:
            return var
    return options[-1][0]


def decompose_integral(
    inst: Instance, frac: FractionalSolution, seed: int = 0, dive_budget: int = 200
) -> Allocation:
    """Extract an integral allocation worth exactly the LP optimum.

    Three stages. Seeded sampling over the support distribution rejects
    any draw that repeats an ad or misses the optimum; a deterministic
    walk then enumerates the entire support. If both fail (an optimal
    basis can be fractional with every feasible support walk dead-ending,
    even when an integral optimum exists), an exact dive re-solves the LP
    with slot contents pinned one by one, descending only into branches
    that preserve the root optimum. The dive finds an integral optimum
    whenever one exists; exhausting it proves the relaxation sits strictly
    above every allocation, which is reported as the integrality
    violation it is.
    """
    first, trans = _transition_tables(frac)
    k = inst.k
    c = inst.window

    def complete(prefix: list[int]) -> bool:
        return len(prefix) == k

    def options_for(prefix: list[int], used: set[int]):
        s = len(prefix)
        state = tuple(reversed(prefix[max(0, s - min(c, s)) :]))
        opts = trans.get((s, state), [])
        return [(v, val) for v, val in opts if v.ad == BOT or v.ad not in used]

    rng = random.Random(seed)
    for _ in range(RETRY_BUDGET):
        prefix: list[int] = []
        used: set[int] = set()
        var = _draw(rng, first)
        while var is not None:
            prefix.append(var.ad)
            if var.ad != BOT:
                used.add(var.ad)
            if complete(prefix):
                break
            var = _draw(rng, options_for(prefix, used))
        if var is None or not complete(prefix):
            continue
        theta = Allocation(tuple(prefix))
        if sw_exact(inst, theta) == frac.objective_value:
            return theta

    # Deterministic fallback: depth-first over the whole support.
    stack: list[tuple[list[int], set[int]]] = [([v.ad], {v.ad} - {BOT}) for v, _ in reversed(first)]
    while stack:
        prefix, used = stack.pop()
        if complete(prefix):
            theta = Allocation(tuple(prefix))
            if sw_exact(inst, theta) == frac.objective_value:
                return theta
            continue
        for var, _ in reversed(options_for(prefix, used)):
            stack.append((prefix + [var.ad], used | ({var.ad} - {BOT})))

    return _dive(inst, frac, dive_budget)


def _dive(inst: Instance, frac: FractionalSolution, budget: int) -> Allocation:
    """Exact branch search: pin slot contents, re-solve, keep root-value
    branches. Pinning a full prefix of an optimal integral allocation never
    lowers the pinned LP below the root, so some branch survives to depth K
    exactly when an integral optimum exists."""
    model = build_lp(inst)
    root = frac.objective_value
    index: dict[LpVar, int] = {var: j for j, var in enumerate(model.vars)}
    contents = list(range(inst.n)) + ([BOT] if inst.reset else [])

    # try heavier support mass first at each slot
    mass: dict[tuple[int, int], float] = {}
    for var, val in frac.values.items():
        key = (var.slot, var.ad)
        mass[key] = mass.get(key, 0.0) + float(val)

    spent = [0]

    def pinned_value(pins: list[int]):
        rows = list(model.rows)
        for s, a in enumerate(pins):
            rows.append(({index[v]: 1 for v in model.vars if v.slot == s and v.ad == a}, EQ, 1))
        try:
            value, _ = _simplex.solve_max(model.objective, rows, model.nvars)
        except _simplex.Infeasible:
            return None
        return value

    def descend(pins: list[int]) -> tuple[int, ...] | None:
        if len(pins) == inst.k:
            return tuple(pins)
        s = len(pins)
        used = {a for a in pins if a != BOT}
        ranked = sorted(
            (a for a in contents if a not in used),
            key=lambda a: (-mass.get((s, a), 0.0), a == BOT, a),
        )
        for a in ranked:
            if spent[0] >= budget:
                raise IntegralityError("decomposition budget exhausted")
            spent[0] += 1
            value = pinned_value(pins + [a])
            if value == root:
                found = descend(pins + [a])
                if found is not None:
                    return found
        return None

    found = descend([])
    if found is None:
        raise IntegralityError("integrality violated")
    theta = Allocation(found)
    assert sw_exact(inst, theta) == root
    return theta


@dataclass(frozen=True)
class SaSolution:
    allocation: Allocation
    value: object  # exact rational welfare == LP optimum
    fractional: FractionalSolution


def solve_fne_sa(inst: Instance, seed: int = 0) -> SaSolution:
    """build -> solve -> decompose, padding thin no-reset instances.

    The no-reset formulation needs N >= K. For N < K the instance is
    augmented with K - N stand-in ads that behave exactly like the empty
    slot (zero value, zero externality on whatever sits below), and they
    map back to BOT afterwards. Plain truncation to N slots would be
    lossy: an ad whose own clicks are killed by an empty slot above can
    still pass attention downward, so the optimum may straddle more than
    N slots.
    """
    work = inst
    pad = 0
    if not inst.reset and inst.n < inst.k:
        pad = inst.k - inst.n
        gamma = np.zeros((inst.k, inst.n + pad))
        gamma[:, : inst.n] = inst.gamma
        work = replace(
            inst,
            q=np.concatenate([inst.q, np.zeros(pad)]),
            v=np.concatenate([inst.v, np.zeros(pad)]),
            gamma=gamma,
        )
    frac = solve_lp(build_lp(work))
    theta = decompose_integral(work, frac, seed=seed)
    if pad:
        theta = Allocation(tuple(BOT if s >= inst.n else s for s in theta.slots))
    return SaSolution(allocation=theta, value=frac.objective_value, fractional=frac)
