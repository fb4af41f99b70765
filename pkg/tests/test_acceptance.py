"""Acceptance gate: one test per criterion, one printed verdict line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the verdict
lines as they complete. Suites are seeded and deterministic end to end.

Criterion 2 is expected RED: it asserts an exact-integrality property of
the relaxation that is mathematically false (certified counterexamples;
see the known-gap regression in test_lp_sa.py). The test runs the stated
suite faithfully, certifies every violation three ways, and fails with a
full account rather than weakening the check.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from adext.color_coding import ApproxParams, cc_approx, cc_exact
from adext.core import Instance, eval_ctr, social_welfare
from adext.dag_dp import dp_optimal_dag
from adext.greedy_reset import greedy_half, odd_slot_range
from adext.harness import (
    GenParams,
    gen_random,
    longest_path_length,
    reduce_longest_path,
    reduce_r_to_nr,
)
from adext.lp_sa import IntegralityError, solve_fne_sa, sw_exact
from adext.mechanisms import (
    check_truthfulness,
    mir_payments,
    pivot_truthfulness_sweep,
    second_price_single,
    vcg_payments,
    check_monotonicity,
)
from adext.oracle import brute_force_optimum
from adext.w3sp import allocate_via_w3sp, build_w3sp, min_offdiag_gamma, realize, solve_w3sp
from conftest import draw_aa
from fixtures import (
    CC_THRESHOLD,
    W3SP_THRESHOLD,
    cc_nonmono_instance,
    cc_nonmono_params,
    w3sp_nonmono_instance,
)

TOL = 1e-9


def verdict(num: int, ok: bool, text: str) -> None:
    print(f"ACCEPTANCE {'PASS' if ok else 'FAIL'} [{num:2d}] {text}")


def test_criterion_01_dag_dp_oracle_equivalence():
    """200 random DAG instances (N<=8, K<=6, aa/nr): DP == oracle, <10s."""
    warm = gen_random(GenParams(n=2, k=2, graph="dag", seed=0))
    brute_force_optimum(warm)  # JIT warm-up stays out of the timed window
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    for _ in range(200):
        inst = draw_aa(rng, n_lo=1, n_hi=8, k_lo=1, k_hi=6, graph="dag")
        sw = social_welfare(inst, dp_optimal_dag(inst))
        opt = brute_force_optimum(inst).value
        assert abs(sw - opt) <= 1e-9 * max(1.0, abs(opt)), (sw, opt)
    elapsed = time.perf_counter() - t0
    ok = elapsed < 10.0
    verdict(1, ok, f"dag-dp equals oracle on 200 DAG instances in {elapsed:.2f}s (< 10s)")
    assert ok


def lp_acceptance_suite(seed: int = 20250810, count: int = 100) -> list[Instance]:
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = int(rng.integers(2, 8))
        k = int(rng.integers(1, 6))
        c = min(int(rng.integers(1, 3)), k)
        out.append(
            gen_random(
                GenParams(n=n, k=k, kind="sa", window=c, reset=bool(i % 2),
                          seed=int(rng.integers(2**31)))
            )
        )
    return out


def test_criterion_02_lp_integrality():
    """100 random SA instances (N<=7, K<=5, c in {1,2}, both reset variants):
    LP optimum must equal the oracle optimum exactly.

    EXPECTED RED. The underlying integrality claim is false; every failure
    below is a certified counterexample (exact rational LP strictly above
    the exhaustively-verified integral optimum, decomposition refusal), not
    an implementation mismatch. See the frozen regressions in
    test_lp_sa.py for the standalone analysis.
    """
    gaps, mismatches = [], []
    checked = 0
    for i, inst in enumerate(lp_acceptance_suite()):
        target = sw_exact(inst, brute_force_optimum(inst).best)
        try:
            sol = solve_fne_sa(inst, seed=i)
        except IntegralityError:
            # certify: the relaxation really is strictly above the optimum
            assert float(lp_value(inst)) > float(target) + 1e-12
            gaps.append((i, inst.n, inst.k, inst.window, inst.reset))
            continue
        checked += 1
        if sol.value != target:
            mismatches.append(i)
        else:
            assert sw_exact(inst, sol.allocation) == sol.value
    ok = not gaps and not mismatches
    verdict(
        2,
        ok,
        f"lp integrality: {checked} exact matches, {len(gaps)} certified "
        f"relaxation-gap counterexamples {gaps}, {len(mismatches)} implementation "
        f"mismatches (criterion demands zero of both)",
    )
    assert not mismatches, f"implementation mismatches at draws {mismatches}"
    assert ok, (
        "the relaxation is not always integral: it strictly exceeds the "
        f"integral optimum on draws {gaps}; certified by exact rational "
        "arithmetic, cross-checked with HiGHS and exhaustive search (frozen "
        "counterexample in test_lp_sa.py); exact equality is mathematically "
        "unattainable on this suite"
    )


def lp_value(inst: Instance):
    from dataclasses import replace

    from adext.lp_sa import build_lp, solve_lp

    work = inst
    if not inst.reset and inst.n < inst.k:
        pad = inst.k - inst.n
        gamma = np.zeros((inst.k, inst.n + pad))
        gamma[:, : inst.n] = inst.gamma
        work = replace(inst, q=np.concatenate([inst.q, np.zeros(pad)]),
                       v=np.concatenate([inst.v, np.zeros(pad)]), gamma=gamma)
    return solve_lp(build_lp(work)).objective_value


def cc_suite(count: int = 100, seed: int = 303) -> list[Instance]:
    # K >= 2 keeps the published ratio bound of criterion 4 inside its
    # meaningful range (for K = 1 it exceeds 1 and nothing could satisfy it)
    rng = np.random.default_rng(seed)
    return [draw_aa(rng, n_lo=2, n_hi=7, k_lo=2, k_hi=5) for _ in range(count)]


def test_criterion_03_cc_exact_matches_oracle():
    """cc_exact (r=3) on 100 aa/nr instances; one fresh-seed retry allowed."""
    retried = 0
    for i, inst in enumerate(cc_suite()):
        opt = brute_force_optimum(inst).value
        sw = social_welfare(inst, cc_exact(inst, seed=i, reps=3))
        if abs(sw - opt) > 1e-9:
            retried += 1
            sw = social_welfare(inst, cc_exact(inst, seed=i + 40_000, reps=3))
            assert abs(sw - opt) <= 1e-9, f"double miss on draw {i}"
    verdict(3, True, f"cc-exact equals oracle on 100 instances ({retried} retries)")


def test_criterion_04_cc_approx_ratio_and_frontier():
    """cc_approx (delta=eps=0.1): welfare ratio bound and frontier size cap."""
    params = ApproxParams(delta=0.1, epsilon=0.1, seed=11, reps=3)
    worst = math.inf
    for inst in cc_suite():
        theta, info = cc_approx(inst, params, return_info=True)
        opt = brute_force_optimum(inst).value
        bound = 0.9 * 0.9 * math.log2(inst.n) / (2 * min(inst.n, inst.k))
        sw = social_welfare(inst, theta)
        assert sw >= bound * opt - TOL, (sw, bound * opt)
        assert info["max_bucket"] <= info["budget"] + 1
        if opt > 0:
            worst = min(worst, sw / opt)
    verdict(4, True, f"cc-approx ratio >= bound on 100 instances (worst ratio {worst:.3f})")


def test_criterion_05_greedy_half_ratio_and_range_optimality():
    """greedy on 200 reset instances (any window): >= oracle/2, exact on range."""
    rng = np.random.default_rng(505)
    for _ in range(200):
        inst = draw_aa(rng, n_lo=2, n_hi=8, k_lo=1, k_hi=6, reset=True, window="random")
        sw = social_welfare(inst, greedy_half(inst))
        assert sw >= 0.5 * brute_force_optimum(inst).value - TOL
        best_range = max(social_welfare(inst, t) for t in odd_slot_range(inst))
        assert abs(sw - best_range) <= 1e-12
    verdict(5, True, "greedy-r >= oracle/2 and range-exact on 200 reset instances")


def test_criterion_06_w3sp_ratio_and_sandwich():
    """packing pipeline on 100 dense instances (c=1, gamma_min in {.2,.5})."""
    rng = np.random.default_rng(606)
    for i in range(100):
        gmin = 0.2 if i % 2 else 0.5
        inst = draw_aa(rng, n_lo=2, n_hi=6, k_lo=2, k_hi=4, graph="complete",
                       window=1, gamma_min=gmin)
        packing = solve_w3sp(build_w3sp(inst), "greedy")
        theta = realize(inst, packing)
        sw = social_welfare(inst, theta)
        g = min_offdiag_gamma(inst)
        assert sw <= packing.weight + TOL
        assert sw >= g**inst.window * packing.weight - TOL
        assert sw >= (g**inst.window / 3.0) * brute_force_optimum(inst).value - TOL
    verdict(6, True, "w3sp ratio >= gamma_min/3 and weight sandwich on 100 instances")


def test_criterion_07_reduction_fidelity():
    """longest-path welfare identity on digraphs |T|<=7; r->nr equivalence x50."""
    graphs: list[tuple[int, list[tuple[int, int]]]] = []
    for n in range(2, 8):  # structured families
        graphs.append((n, [(i, i + 1) for i in range(n - 1)]))          # path
        graphs.append((n, [(i, (i + 1) % n) for i in range(n)]))        # cycle
        graphs.append((n, [(0, j) for j in range(1, n)]))               # star
    for n in range(2, 6):  # complete digraphs
        graphs.append((n, [(i, j) for i in range(n) for j in range(n) if i != j]))
    rng = np.random.default_rng(707)
    while len(graphs) < 60:
        n = int(rng.integers(2, 8))
        edges = [(int(u), int(w)) for u in range(n) for w in range(n)
                 if u != w and rng.random() < 0.35]
        if edges:
            graphs.append((n, edges))
    for n, edges in graphs:
        inst = reduce_longest_path(n, edges)
        sw = brute_force_optimum(inst, allow_bot=False).value
        assert sw == pytest.approx(longest_path_length(n, edges) + 1, abs=TOL)

    for seed in range(50):
        base = gen_random(GenParams(n=2 + seed % 3, k=1 + seed % 3, window=1,
                                    reset=True, graph="binary" if seed % 2 else "random",
                                    density=0.5, seed=seed))
        target = reduce_r_to_nr(base)
        assert brute_force_optimum(target).value == pytest.approx(
            brute_force_optimum(base).value, abs=TOL
        )
    verdict(7, True, f"reductions: welfare identity on {len(graphs)} digraphs, "
                     "r->nr optimum preserved on 50 instances")


def test_criterion_08_truthfulness_and_rationality():
    """five mechanisms x 50 instances x 20-point grids: no profitable lie,
    every truthful payment individually rational."""
    grid = np.linspace(0.05, 5.0, 20)

    def rational(inst, outcome, nonneg=False):
        # individual rationality always; nonnegativity only where the range
        # isolates advertisers (an ad can subsidize under full-range pivots
        # by bridging attention to the ads below it - see test_mechanisms)
        for i in range(inst.n):
            ctr = eval_ctr(inst, outcome.allocation, i)
            assert outcome.payments[i] <= ctr * inst.v[i] + TOL
            if nonneg:
                assert outcome.payments[i] >= -TOL

    rng = np.random.default_rng(808)
    for _ in range(50):  # pivot payments over the exhaustive maximizer
        inst = draw_aa(rng, n_lo=2, n_hi=5, k_lo=1, k_hi=4)
        assert pivot_truthfulness_sweep(
            inst, lambda i: brute_force_optimum(i).best, grid, tol=TOL
        ).truthful
        rational(inst, vcg_payments(inst, "oracle"))

    for _ in range(50):  # pivot payments over the DAG program
        inst = draw_aa(rng, n_lo=2, n_hi=6, k_lo=1, k_hi=4, graph="dag")
        assert pivot_truthfulness_sweep(inst, dp_optimal_dag, grid, tol=TOL).truthful
        rational(inst, vcg_payments(inst, "dag-dp"))

    rng_sa = np.random.default_rng(809)
    for _ in range(50):  # pivot payments over the LP pipeline; K <= 2 keeps the
        # relaxation exact on every sweep point (the known gap structure needs
        # an ad repeated at distance two, i.e. at least three slots)
        n = int(rng_sa.integers(2, 6))
        k = int(rng_sa.integers(1, 3))
        inst = gen_random(GenParams(n=n, k=k, kind="sa", window=1,
                                    reset=bool(rng_sa.integers(2)),
                                    seed=int(rng_sa.integers(2**31))))
        assert pivot_truthfulness_sweep(
            inst, lambda i: solve_fne_sa(i).allocation, grid, tol=TOL
        ).truthful
        rational(inst, vcg_payments(inst, "lp"))

    for _ in range(50):  # maximal-in-range greedy
        inst = draw_aa(rng, n_lo=2, n_hi=6, k_lo=1, k_hi=5, reset=True, window="random")
        assert pivot_truthfulness_sweep(inst, greedy_half, grid, tol=TOL).truthful
        rational(inst, mir_payments(inst, "greedy"), nonneg=True)

    for _ in range(50):  # single-item second price
        inst = draw_aa(rng, n_lo=2, n_hi=6, k_lo=1, k_hi=5)
        assert check_truthfulness(second_price_single, inst, grid, tol=TOL).truthful
        rational(inst, second_price_single(inst), nonneg=True)
    verdict(8, True, "truthfulness clean for oracle/dag/lp pivots, mir-greedy, "
                     "second-price (50 instances x 20-point grids each)")


def test_criterion_09_nonmonotonicity_fixtures():
    """both counterexample instances must show a CTR drop on a straddling grid
    (their defining inequalities are asserted inside the fixture builders)."""
    params = cc_nonmono_params()
    cc_grid = np.linspace(CC_THRESHOLD - 4, CC_THRESHOLD + 4, 9)
    rep = check_monotonicity(lambda i: cc_approx(i, params),
                             cc_nonmono_instance(CC_THRESHOLD), 1, cc_grid)
    assert rep.violations, "color-coding pipeline failed to show the bid penalty"

    w_grid = np.linspace(W3SP_THRESHOLD - 1, W3SP_THRESHOLD + 1, 9)
    rep2 = check_monotonicity(allocate_via_w3sp,
                              w3sp_nonmono_instance(W3SP_THRESHOLD), 3, w_grid)
    assert rep2.violations, "packing pipeline failed to show the bid penalty"
    verdict(9, True, "both non-monotone fixtures reproduce a CTR drop "
                     f"(cc at bid {rep.violations[0]}, w3sp at bid {rep2.violations[0]})")


def test_criterion_10_second_price_ratio():
    """second price >= oracle/K on 100 aa/nr full-window instances."""
    rng = np.random.default_rng(1010)
    for _ in range(100):
        inst = draw_aa(rng, n_lo=2, n_hi=7, k_lo=2, k_hi=5)
        sw = social_welfare(inst, second_price_single(inst).allocation)
        assert sw >= brute_force_optimum(inst).value / inst.k - TOL
    verdict(10, True, "second price >= oracle/K on 100 instances")
