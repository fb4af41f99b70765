"""Exact-arithmetic primal simplex (dense tableau, two phases).

All arithmetic is done in rationals so optima are certified, not
approximated: gmpy2's mpq when available (much faster), stdlib Fraction
otherwise. The pivot rule is most-negative reduced cost, switching to
Bland's rule after a run of degenerate pivots so cycling is impossible.
"""

from __future__ import annotations

from typing import Sequence

try:
    from gmpy2 import mpq as R
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    from fractions import Fraction as R

R0 = R(0)
R1 = R(1)

LE = "<="
EQ = "=="

_BLAND_AFTER = 40  # consecutive degenerate pivots before switching rule


class Infeasible(RuntimeError):
    pass


class Unbounded(RuntimeError):
    pass


def rat(x) -> R:
    """Exact rational from an int, float (binary-exact), or rational."""
    return R(x)


def solve_max(
    objective: Sequence,
    rows: Sequence[tuple[dict[int, object], str, object]],
    nvars: int,
):
    """Maximize ``objective . x`` over ``x >= 0`` subject to ``rows``.

    Each row is ``(coeffs, sense, rhs)`` with ``coeffs`` a sparse
    ``{var_index: coefficient}`` map and sense '<=' or '=='. Returns
    ``(value, x)`` as exact rationals.
    """
    m = len(rows)
    nslack = sum(1 for _, sense, _ in rows if sense == LE)
    ncols = nvars + nslack + m  # one artificial slot per row, used as needed
    art0 = nvars + nslack

    tab = [[R0] * (ncols + 1) for _ in range(m)]
    basis = [-1] * m
    slack_at = nvars
    for i, (coeffs, sense, rhs) in enumerate(rows):
        rhs = rat(rhs)
        neg = rhs < 0
        if neg:
            rhs = -rhs
        row = tab[i]
        for j, a in coeffs.items():
            a = rat(a)
            row[j] = -a if neg else a
        if sense == LE:
            row[slack_at] = -R1 if neg else R1
            if neg:  # negated <= became >=: slack enters with -1, base on artificial
                row[art0 + i] = R1
                basis[i] = art0 + i
            else:
                basis[i] = slack_at
            slack_at += 1
        elif sense == EQ:
            row[art0 + i] = R1
            basis[i] = art0 + i
        else:
            raise ValueError(f"unknown sense {sense!r}")
        row[ncols] = rhs

    # Phase 1: minimize the artificial mass.
    cost1 = [R0] * ncols
    for j in range(art0, ncols):
        cost1[j] = R1
    value = _run(tab, basis, cost1, ncols, stop_at_zero=True)
    if value > 0:
        raise Infeasible("no feasible point")
    _drive_out_artificials(tab, basis, ncols, art0)

    # Phase 2: minimize the negated objective, artificial columns banned.
    cost2 = [R0] * ncols
    for j, c in enumerate(objective):
        cost2[j] = -rat(c)
    value = _run(tab, basis, cost2, ncols, limit=art0)
    x = [R0] * nvars
    for i, b in enumerate(basis):
        if b < nvars:
            x[b] = tab[i][ncols]
    return -value, x


def _objective_row(tab, basis, cost, ncols):
    """Row of reduced costs; entry ncols holds -z for the current basis."""
    red = list(cost) + [R0]
    for i, row in enumerate(tab):
        cb = cost[basis[i]]
        if cb != 0:
            for j in range(ncols + 1):
                if row[j] != 0:
                    red[j] -= cb * row[j]
    return red


def _run(tab, basis, cost, ncols, stop_at_zero=False, limit=None):
    """Minimize ``cost`` from the current basic feasible point; return z*."""
    m = len(tab)
    red = _objective_row(tab, basis, cost, ncols)
    if limit is None:
        limit = ncols
    degenerate_run = 0
    bland = False
    while True:
        z = -red[ncols]
        if stop_at_zero and z == 0:
            return z
        enter = -1
        if bland:
            for j in range(limit):
                if red[j] < 0:
                    enter = j
                    break
        else:
            best = R0
            for j in range(limit):
                if red[j] < best:
                    best = red[j]
                    enter = j
        if enter < 0:
            return z
        leave = -1
        ratio = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                r = tab[i][ncols] / a
                if ratio is None or r < ratio or (r == ratio and basis[i] < basis[leave]):
                    ratio = r
                    leave = i
        if leave < 0:
            raise Unbounded("objective unbounded")
        if ratio == 0:
            degenerate_run += 1
            if degenerate_run >= _BLAND_AFTER:
                bland = True
        else:
            # off the degenerate plateau: Dantzig again (objective strictly
            # improved, so no basis can ever repeat and cycling stays impossible)
            degenerate_run = 0
            bland = False
        _pivot(tab, basis, red, leave, enter, ncols)


def _pivot(tab, basis, red, leave, enter, ncols):
    prow = tab[leave]
    piv = prow[enter]
    if piv != 1:
        inv = R1 / piv
        for j in range(ncols + 1):
            if prow[j] != 0:
                prow[j] *= inv
    hot = [j for j in range(ncols + 1) if prow[j] != 0]
    for row in tab:
        if row is prow:
            continue
        f = row[enter]
        if f != 0:
            for j in hot:
                row[j] -= f * prow[j]
    f = red[enter]
    if f != 0:
        for j in hot:
            red[j] -= f * prow[j]
    basis[leave] = enter


def _drive_out_artificials(tab, basis, ncols, art0):
    """Pivot zero-level artificials out of the basis; drop redundant rows."""
    drop = []
    for i in range(len(tab)):
        if basis[i] >= art0:
            row = tab[i]
            enter = next((j for j in range(art0) if row[j] != 0), None)
            if enter is None:
                drop.append(i)
            else:
                _pivot(tab, basis, [R0] * (ncols + 1), i, enter, ncols)
    for i in reversed(drop):
        del tab[i]
        del basis[i]
