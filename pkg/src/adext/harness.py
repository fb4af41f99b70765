"""Instance generators, hardness-reduction generators, and the benchmark.

Generated numeric values live on a 1/64 grid. Those are exact binary
floats, so products of a few of them are still exact, which keeps the
rational-arithmetic checks in the LP module meaningful and makes welfare
comparisons reproducible across backends.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, replace
from itertools import permutations
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .core import BOT, Allocation, Instance, ModelSpec, social_welfare, validate_instance
from .oracle import OracleCapError, brute_force_optimum
from .solvers import get_solver, theoretical_bound

GRID = 64  # denominator of the sampling grid


@dataclass(frozen=True)
class GenParams:
    """Shape and value ranges of a random instance."""

    n: int
    k: int
    kind: str = "aa"
    window: int | None = None  # defaults to k
    reset: bool = False
    graph: str = "random"  # random | dag | complete | binary (aa only)
    density: float = 0.6
    gamma_min: float = 0.2  # lower bound for the complete graph class
    q_lo: float = 1 / GRID
    q_hi: float = 1.0
    v_lo: float = 1 / GRID
    v_hi: float = 4.0
    lam_lo: float = 0.5
    seed: int = 0


def _grid_uniform(rng: np.random.Generator, lo: float, hi: float, size) -> np.ndarray:
    # endpoints snap inward so requested bounds are never violated
    lo_t = math.ceil(lo * GRID - 1e-9)
    hi_t = math.floor(hi * GRID + 1e-9)
    return rng.integers(lo_t, hi_t + 1, size=size) / GRID


def gen_random(params: GenParams) -> Instance:
    """Seeded random instance of the requested class (always validates)."""
    rng = np.random.default_rng(params.seed)
    window = params.window if params.window is not None else params.k
    n, k = params.n, params.k
    q = _grid_uniform(rng, params.q_lo, params.q_hi, n)
    v = _grid_uniform(rng, params.v_lo, params.v_hi, n)

    if params.kind == "sa":
        if params.graph != "random":
            raise ValueError(f"graph class {params.graph!r} applies to aa instances only")
        gamma = _grid_uniform(rng, 0.0, 1.0, (k, n))
        inst = Instance(
            k=k, q=q, v=v, gamma=gamma, model=ModelSpec("sa", window, params.reset)
        )
    elif params.kind == "aa":
        gamma = np.zeros((n, n))
        if params.graph == "random":
            for i in range(n):
                for j in range(n):
                    if i != j and rng.random() < params.density:
                        gamma[i, j] = _grid_uniform(rng, 1 / GRID, 1.0, None)
        elif params.graph == "dag":
            order = rng.permutation(n)
            for a in range(n):
                for b in range(a + 1, n):
                    if rng.random() < params.density:
                        gamma[order[a], order[b]] = _grid_uniform(rng, 1 / GRID, 1.0, None)
        elif params.graph == "complete":
            lo = max(params.gamma_min, 1 / GRID)
            for i in range(n):
                for j in range(n):
                    if i != j:
                        gamma[i, j] = _grid_uniform(rng, lo, 1.0, None)
        elif params.graph == "binary":
            for i in range(n):
                for j in range(n):
                    if i != j and rng.random() < params.density:
                        gamma[i, j] = 1.0
        else:
            raise ValueError(f"unknown graph class {params.graph!r}")
        lam = np.ones(k)
        if k > 1:
            lam[1:] = _grid_uniform(rng, params.lam_lo, 1.0, k - 1)
        inst = Instance(
            k=k, q=q, v=v, gamma=gamma, lam=lam,
            model=ModelSpec("aa", window, params.reset),
        )
    else:
        raise ValueError(f"unknown model kind {params.kind!r}")

    bad = validate_instance(inst)
    if bad:
        raise AssertionError(f"generator produced an invalid instance: {bad}")
    return inst


# ---------------------------------------------------------------------------
# Hardness reductions, kept as instance generators with round-trip helpers
# ---------------------------------------------------------------------------

def reduce_longest_path(n_vertices: int, edges: Sequence[tuple[int, int]]) -> Instance:
    """Digraph -> aa/no-reset instance whose optimum welfare is
    (longest simple path length) + 1: one unit-value ad per vertex,
    unit externality along each arc, N = K = |T|, flat prominence."""
    if n_vertices < 1:
        raise ValueError("graph must have at least one vertex")
    if not edges:
        raise ValueError("longest-path reduction needs at least one edge")
    gamma = np.zeros((n_vertices, n_vertices))
    for u, w in edges:
        if u == w or not (0 <= u < n_vertices and 0 <= w < n_vertices):
            raise ValueError(f"bad edge ({u},{w})")
        gamma[u, w] = 1.0
    return Instance(
        k=n_vertices,
        q=np.ones(n_vertices),
        v=np.ones(n_vertices),
        gamma=gamma,
        lam=np.ones(n_vertices),
        model=ModelSpec("aa", n_vertices, False),
    )


def longest_path_length(n_vertices: int, edges: Sequence[tuple[int, int]]) -> int:
    """Exhaustive longest simple path (edge count); independent of the
    welfare machinery so it can serve as its oracle."""
    adj = [[] for _ in range(n_vertices)]
    for u, w in edges:
        adj[u].append(w)
    best = 0

    def walk(node: int, seen: set[int], length: int) -> None:
        nonlocal best
        best = max(best, length)
        for nxt in adj[node]:
            if nxt not in seen:
                walk(nxt, seen | {nxt}, length + 1)

    for start in range(n_vertices):
        walk(start, {start}, 0)
    return best


def reduce_atsp12(weights: np.ndarray, k: int) -> Instance:
    """{1,2}-weighted complete digraph -> aa/reset instance with binary
    externalities (edge weight 1 becomes externality 1) over ``k`` slots."""
    weights = np.asarray(weights)
    n = len(weights)
    off = ~np.eye(n, dtype=bool)
    if not np.all(np.isin(weights[off], (1, 2))):
        raise ValueError("weights must be 1 or 2 off the diagonal")
    if not n <= k <= 2 * n:
        raise ValueError(f"slot count {k} outside [{n}, {2 * n}]")
    gamma = np.where(weights == 1, 1.0, 0.0)
    np.fill_diagonal(gamma, 0.0)
    return Instance(
        k=k,
        q=np.ones(n),
        v=np.ones(n),
        gamma=gamma,
        lam=np.ones(k),
        model=ModelSpec("aa", k, True),
    )


def tour_cost(weights: np.ndarray, order: Sequence[int]) -> int:
    """Cost of the cyclic tour visiting ``order``."""
    n = len(order)
    return int(sum(weights[order[i], order[(i + 1) % n]] for i in range(n)))


def allocation_to_tour(theta: Allocation) -> list[int]:
    """Vertices in allocation order; requires every ad to be allocated."""
    return [s for s in theta.slots if s != BOT]


def atsp_optimum(weights: np.ndarray) -> int:
    """Exact minimum tour cost by enumeration (first vertex pinned)."""
    n = len(weights)
    if n == 1:
        return 0
    return min(tour_cost(weights, (0,) + rest) for rest in permutations(range(1, n)))


def reduce_r_to_nr(inst: Instance) -> Instance:
    """Window-1 reset instance -> no-reset instance with K extra zero-value
    ads wired with unit externality both ways, which stand in for the
    empty slots. Optimal welfare is preserved exactly."""
    if inst.model.kind != "aa" or inst.window != 1 or not inst.reset:
        raise ValueError("reduction applies to aa instances with window 1 and reset")
    n, k = inst.n, inst.k
    gamma = np.ones((n + k, n + k))
    gamma[:n, :n] = inst.gamma
    np.fill_diagonal(gamma, 0.0)
    return replace(
        inst,
        q=np.concatenate([inst.q, np.ones(k)]),
        v=np.concatenate([inst.v, np.zeros(k)]),
        gamma=gamma,
        model=ModelSpec("aa", 1, False),
    )


# ---------------------------------------------------------------------------
# Benchmark runner
# ---------------------------------------------------------------------------

CSV_HEADER = ["instance", "algo", "sw", "oracle_sw", "ratio", "bound", "ms"]


@dataclass
class ReportRow:
    instance: str
    algo: str
    sw: float
    oracle_sw: float | None
    ratio: float | None
    bound: float
    ms: float

    def ok(self) -> bool:
        return self.ratio is None or self.ratio >= self.bound - 1e-9

    def as_list(self) -> list[Any]:
        fmt = lambda x: "" if x is None else f"{x:.9g}"
        return [self.instance, self.algo, f"{self.sw:.9g}",
                fmt(self.oracle_sw), fmt(self.ratio), f"{self.bound:.9g}", f"{self.ms:.3f}"]


def run_bench(config: dict[str, Any], out_path: str | Path | None = None) -> list[ReportRow]:
    """One row per (instance, algorithm); rows sorted for determinism.

    The config mirrors the instance file conventions::

        {"instances": ["a.json", ...], "algorithms": ["lp", "greedy-r", ...],
         "seeds": [0], "delta": 0.1, "epsilon": 0.1, "reps": 3,
         "oracle_cap": 10000000}

    Stochastic algorithms take the first seed. A row with an oracle value
    whose empirical ratio undercuts the theoretical bound marks the run
    as failed (nonzero exit through the CLI).
    """
    from .io import load_instance

    seeds = config.get("seeds", [0])
    opts = {
        "seed": seeds[0] if seeds else 0,
        "delta": config.get("delta", 0.1),
        "epsilon": config.get("epsilon", 0.1),
        "reps": config.get("reps", 3),
        "packing": config.get("packing", "greedy"),
    }
    cap = config.get("oracle_cap", 10_000_000)
    rows: list[ReportRow] = []
    for path in config["instances"]:
        inst = load_instance(path)
        name = Path(path).stem
        try:
            oracle_sw = brute_force_optimum(inst, cap=cap).value
        except OracleCapError:
            oracle_sw = None
        for algo in config["algorithms"]:
            solver = get_solver(algo, **opts)
            t0 = time.perf_counter()
            theta = solver(inst)
            ms = (time.perf_counter() - t0) * 1e3
            sw = social_welfare(inst, theta)
            if oracle_sw is None:
                ratio = None
            elif oracle_sw == 0:
                ratio = 1.0
            else:
                ratio = sw / oracle_sw
            rows.append(
                ReportRow(name, algo, sw, oracle_sw, ratio,
                          theoretical_bound(algo, inst, **opts), ms)
            )
    rows.sort(key=lambda r: (r.instance, r.algo))
    if out_path is not None:
        with open(out_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for row in rows:
                writer.writerow(row.as_list())
    return rows
