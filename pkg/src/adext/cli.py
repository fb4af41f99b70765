"""Command-line interface.

Subcommands: ``oracle``, ``solve``, ``payments``, ``check-mono``, ``gen``,
``reduce`` and ``bench``. Ads are 1-based on the command line and in all
files; see :mod:`adext.io` for the formats.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import harness, io, lp_sa, mechanisms, solvers
from .core import social_welfare
from .oracle import brute_force_optimum


def _add_instance(p: argparse.ArgumentParser) -> None:
    p.add_argument("--instance", required=True, help="instance JSON file")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="adext", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("oracle", help="exhaustive optimum of a small instance")
    _add_instance(p)
    p.add_argument("--no-bot", action="store_true", help="forbid empty slots")
    p.add_argument("--cap", type=int, default=10_000_000)

    p = sub.add_parser("solve", help="run one allocation algorithm")
    _add_instance(p)
    p.add_argument("--algo", required=True, choices=solvers.ALGORITHMS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--exact", action="store_true",
                   help="with --algo cc: run the exact variant")
    p.add_argument("--packing", choices=["greedy", "local"], default="greedy")

    p = sub.add_parser("payments", help="allocation plus truthful payments")
    _add_instance(p)
    p.add_argument("--mechanism", required=True,
                   choices=["vcg", "mir-greedy", "mir-cc", "second-price"])
    p.add_argument("--solver", default="oracle", choices=sorted(mechanisms.EXACT_SOLVERS),
                   help="exact solver backing the vcg mechanism")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("check-mono", help="sweep one agent's bid, watch its CTR")
    _add_instance(p)
    p.add_argument("--algo", required=True, choices=solvers.ALGORITHMS)
    p.add_argument("--agent", type=int, required=True, help="1-based ad index")
    p.add_argument("--grid", required=True, help="lo:hi:steps")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--reps", type=int, default=3)

    p = sub.add_parser("gen", help="write a random instance")
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--model", choices=["aa", "sa"], default="aa")
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--reset", action="store_true")
    p.add_argument("--graph", choices=["random", "dag", "complete", "binary"],
                   default="random")
    p.add_argument("--density", type=float, default=0.6)
    p.add_argument("--gamma-min", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("reduce", help="hardness reductions as generators")
    red = p.add_subparsers(dest="reduction", required=True)
    q = red.add_parser("longest-path", help="digraph file -> aa/nr instance")
    q.add_argument("--graph", required=True,
                   help='JSON {"vertices": n, "edges": [[u,v],...]} (1-based)')
    q.add_argument("--out", required=True)
    q = red.add_parser("atsp12", help="{1,2}-ATSP file -> aa/r instance")
    q.add_argument("--graph", required=True,
                   help='JSON {"vertices": n, "weights": [[...]]}')
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--out", required=True)
    q = red.add_parser("r-to-nr", help="window-1 reset instance -> no-reset")
    q.add_argument("--instance", required=True)
    q.add_argument("--out", required=True)

    p = sub.add_parser("bench", help="run an algorithm/instance matrix")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="CSV report path")
    return top


def _parse_grid(spec: str) -> np.ndarray:
    lo, hi, steps = spec.split(":")
    return np.linspace(float(lo), float(hi), int(steps))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "oracle":
        inst = io.load_instance(args.instance)
        res = brute_force_optimum(inst, allow_bot=not args.no_bot, cap=args.cap)
        print(f"allocation: {io.format_allocation(res.best)}")
        print(f"welfare: {res.value:.12g}")
        print(f"enumerated: {res.count}")
        return 0

    if args.command == "solve":
        inst = io.load_instance(args.instance)
        algo = "cc-exact" if (args.algo == "cc" and args.exact) else args.algo
        if algo == "lp":
            try:
                sol = lp_sa.solve_fne_sa(inst, seed=args.seed)
            except lp_sa.IntegralityError as exc:
                print(f"refused: {exc} - the relaxation of this instance sits "
                      "strictly above every integral allocation")
                return 2
            gap = sol.fractional.objective_value - lp_sa.sw_exact(inst, sol.allocation)
            print(f"allocation: {io.format_allocation(sol.allocation)}")
            print(f"welfare: {sol.value} = {float(sol.value):.12g}")
            print(f"lp-ilp gap: {gap}")
            return 0
        solver = solvers.get_solver(
            algo, seed=args.seed, delta=args.delta, epsilon=args.epsilon,
            reps=args.reps, packing=args.packing,
        )
        theta = solver(inst)
        print(f"allocation: {io.format_allocation(theta)}")
        print(f"welfare: {social_welfare(inst, theta):.12g}")
        return 0

    if args.command == "payments":
        inst = io.load_instance(args.instance)
        if args.mechanism == "vcg":
            out = mechanisms.vcg_payments(inst, solver=args.solver)
        elif args.mechanism == "mir-greedy":
            out = mechanisms.mir_payments(inst, "greedy")
        elif args.mechanism == "mir-cc":
            out = mechanisms.mir_payments(inst, "cc", seed=args.seed)
        else:
            out = mechanisms.second_price_single(inst)
        print(f"allocation: {io.format_allocation(out.allocation)}")
        for i in range(inst.n):
            print(f"a{i + 1}: payment={out.payments[i]:.12g} "
                  f"per-click={out.per_click_prices[i]:.12g}")
        return 0

    if args.command == "check-mono":
        inst = io.load_instance(args.instance)
        solver = solvers.get_solver(
            args.algo, seed=args.seed, delta=args.delta, epsilon=args.epsilon,
            reps=args.reps,
        )
        report = mechanisms.check_monotonicity(
            solver, inst, args.agent - 1, _parse_grid(args.grid), tol=args.tol
        )
        for bid, ctr in zip(report.grid, report.ctrs):
            print(f"bid={bid:.6g} ctr={ctr:.6g}")
        if report.monotone:
            print("monotone: yes")
            return 0
        for lo, hi in report.violations:
            print(f"violation: ctr drops between bids {lo:.6g} and {hi:.6g}")
        print("monotone: no")
        return 1

    if args.command == "gen":
        params = harness.GenParams(
            n=args.n, k=args.k, kind=args.model, window=args.window,
            reset=args.reset, graph=args.graph, density=args.density,
            gamma_min=args.gamma_min, seed=args.seed,
        )
        io.save_instance(harness.gen_random(params), args.out)
        print(f"wrote {args.out}")
        return 0

    if args.command == "reduce":
        if args.reduction == "longest-path":
            doc = json.loads(Path(args.graph).read_text())
            edges = [(u - 1, w - 1) for u, w in doc["edges"]]
            inst = harness.reduce_longest_path(doc["vertices"], edges)
        elif args.reduction == "atsp12":
            doc = json.loads(Path(args.graph).read_text())
            inst = harness.reduce_atsp12(np.array(doc["weights"]), args.k)
        else:
            inst = harness.reduce_r_to_nr(io.load_instance(args.instance))
        io.save_instance(inst, args.out)
        print(f"wrote {args.out}")
        return 0

    if args.command == "bench":
        config = json.loads(Path(args.config).read_text())
        rows = harness.run_bench(config, args.out)
        bad = [r for r in rows if not r.ok()]
        print(f"wrote {args.out} ({len(rows)} rows)")
        for r in bad:
            print(f"BOUND VIOLATION: {r.instance}/{r.algo} ratio={r.ratio} < {r.bound}")
        return 1 if bad else 0

    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
