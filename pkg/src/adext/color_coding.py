"""Color-coding solvers for ad-ad instances without reset.

Random colorings turn the "each ad at most once" constraint into a "each
color at most once" constraint that a subset dynamic program can handle.
Running the program over enough independent colorings recovers the true
optimum with high probability (exact mode); truncating to K' slots,
discarding low-attention prefixes, and rounding the externality weights
onto a geometric grid makes it polynomial at a bounded welfare loss
(approximate mode).

All logarithms are base 2. Rounded bookkeeping uses the pessimistic grid
point: a weight gamma counts as 2^(-tau * (cap + 1)) where
cap = floor(log2(1/gamma) / tau), so true welfare always dominates the
rounded welfare of the same allocation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Allocation, Instance, ModelError, allocation_from_ads, social_welfare


@dataclass(frozen=True)
class ApproxParams:
    """Knobs of the polynomial pipeline.

    ``delta`` discards prefixes whose last ad keeps less than delta
    attention; ``epsilon`` controls the rounding grid; ``reps`` scales the
    number of colorings (ceil(reps * e^K') of them).
    """

    delta: float
    epsilon: float
    seed: int = 0
    reps: int = 3

    def __post_init__(self) -> None:
        if not 0 < self.delta < 1 or not 0 < self.epsilon < 1:
            raise ValueError("delta and epsilon must lie in (0,1)")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")

    def kprime(self, n: int, k: int) -> int:
        return max(1, min(math.ceil(math.log2(n)) if n > 1 else 1, k))

    def tau(self, kprime: int) -> float:
        return math.log2(1.0 / (1.0 - self.epsilon)) / kprime

    def budget(self, tau: float) -> int:
        return math.floor(math.log2(1.0 / self.delta) / tau)


def rounded_capacity(gamma: float, tau: float) -> float:
    """floor(log2(1/gamma)/tau); 0 maps to +inf, 1 maps to 0."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    if gamma <= 0.0:
        return math.inf
    return float(math.floor(math.log2(1.0 / gamma) / tau))


def _require_cc(inst: Instance) -> None:
    if inst.model.kind != "aa" or inst.reset:
        raise ModelError("color coding applies to aa no-reset instances")


def _canonical(coloring: np.ndarray) -> tuple[int, ...]:
    """Relabel colors by first occurrence; colorings equal up to renaming
    explore identical allocation sets, so their DP runs can be shared."""
    relabel: dict[int, int] = {}
    out = []
    for col in coloring:
        out.append(relabel.setdefault(int(col), len(relabel)))
    return tuple(out)


def _colorings(n: int, ncolors: int, count: int, seed: int):
    rng = np.random.default_rng(seed)
    seen: set[tuple[int, ...]] = set()
    batch = []
    for _ in range(count):
        key = _canonical(rng.integers(0, ncolors, size=n))
        if key not in seen:
            seen.add(key)
            batch.append(np.array(key, dtype=np.int64))
    return batch


def colorful_dp_exact(
    inst: Instance, coloring: np.ndarray, slots_used: int
) -> tuple[Allocation, float]:
    """Best allocation whose ads carry pairwise-distinct colors.

    Fills slots 1..slots_used top-down. With a window covering the whole
    prefix the state is (color set, last ad) and partial allocations are
    kept on a Pareto frontier over (welfare, attention of the last ad);
    with a shorter window the last ``window`` ads determine everything, so
    a plain maximum per (color set, recent ads) suffices.
    """
    _require_cc(inst)
    if slots_used > inst.k:
        raise ValueError("slots_used exceeds the slot count")
    n, c = inst.n, inst.window
    qv = inst.q * inst.v
    lam = inst.lam_cum
    g = inst.gamma
    best_sw = 0.0
    best_prefix: tuple[int, ...] = ()

    def consider(sw: float, prefix: tuple[int, ...]) -> None:
        nonlocal best_sw, best_prefix
        if sw > best_sw or (sw == best_sw and prefix < best_prefix):
            best_sw, best_prefix = sw, prefix

    if c >= slots_used - 1:
        # frontier[(mask, last)] -> list of (sw, chain, prefix), Pareto-incomparable
        level: dict[tuple[int, int], list[tuple[float, float, tuple[int, ...]]]] = {}
        for j in range(n):
            entry = (lam[0] * qv[j], 1.0, (j,))
            level.setdefault((1 << int(coloring[j]), j), []).append(entry)
            consider(entry[0], entry[2])
        for pos in range(1, slots_used):
            nxt: dict[tuple[int, int], list[tuple[float, float, tuple[int, ...]]]] = {}
            for (mask, last), entries in level.items():
                for j in range(n):
                    bit = 1 << int(coloring[j])
                    if mask & bit:
                        continue
                    gj = g[last, j]
                    for sw, chain, prefix in entries:
                        chain2 = chain * gj
                        sw2 = sw + lam[pos] * chain2 * qv[j]
                        _pareto_insert(
                            nxt.setdefault((mask | bit, j), []), (sw2, chain2, prefix + (j,))
                        )
                        consider(sw2, prefix + (j,))
            level = nxt
    else:
        # state[(mask, recent)] -> (sw, prefix); recent = last min(c, len) ads
        state: dict[tuple[int, tuple[int, ...]], tuple[float, tuple[int, ...]]] = {
            (0, ()): (0.0, ())
        }
        for pos in range(slots_used):
            nxt: dict[tuple[int, tuple[int, ...]], tuple[float, tuple[int, ...]]] = {}
            for (mask, recent), (sw, prefix) in state.items():
                for j in range(n):
                    bit = 1 << int(coloring[j])
                    if mask & bit:
                        continue
                    chain = 1.0
                    window = recent + (j,)
                    for a, b in zip(window, window[1:]):
                        chain *= g[a, b]
                    sw2 = sw + lam[pos] * chain * qv[j]
                    key = (mask | bit, window[-min(c, pos + 1) :])
                    cur = nxt.get(key)
                    prefix2 = prefix + (j,)
                    if cur is None or sw2 > cur[0] or (sw2 == cur[0] and prefix2 < cur[1]):
                        nxt[key] = (sw2, prefix2)
                    consider(sw2, prefix2)
            state = nxt

    return allocation_from_ads(best_prefix, inst.k), best_sw


def _pareto_insert(entries: list, cand: tuple[float, float, tuple[int, ...]]) -> None:
    sw, chain, _ = cand
    for esw, echain, _ in entries:
        if esw >= sw and echain >= chain:
            return
    entries[:] = [e for e in entries if not (e[0] <= sw and e[1] <= chain)]
    entries.append(cand)


def cc_exact(inst: Instance, seed: int = 0, reps: int = 3) -> Allocation:
    """Best allocation over ceil(reps * e^K) random colorings with K colors.

    Finds the true optimum with probability at least 1 - e^(-reps); the
    miss probability shrinks further because duplicate colorings (up to
    color renaming) are collapsed before running the subset DP.
    """
    _require_cc(inst)
    k = inst.k
    count = math.ceil(reps * math.exp(k))
    best: tuple[float, tuple[int, ...]] | None = None
    for coloring in _colorings(inst.n, k, count, seed):
        theta, sw = colorful_dp_exact(inst, coloring, k)
        cand = (sw, theta.slots)
        if best is None or cand[0] > best[0] or (cand[0] == best[0] and cand[1] < best[1]):
            best = cand
    assert best is not None
    return Allocation(best[1])


def cc_approx(
    inst: Instance, params: ApproxParams, return_info: bool = False
) -> Allocation | tuple[Allocation, dict]:
    """Polynomial color-coding pipeline over the first K' slots.

    Every surviving prefix satisfies the rounded capacity constraint
    (attention of its last ad at least ~delta); per (state, spent
    capacity) only the best rounded-welfare entry is kept, which caps the
    frontier at budget+1 entries per state. The returned allocation
    maximizes rounded welfare across colorings; true welfare is reported.
    """
    _require_cc(inst)
    n, k, c = inst.n, inst.k, inst.window
    kp = params.kprime(n, k)
    tau = params.tau(kp)
    budget = params.budget(tau)
    qv = inst.q * inst.v
    lam = inst.lam_cum
    g = inst.gamma
    caps = np.full((n, n), math.inf)
    pos_mask = inst.gamma > 0
    caps[pos_mask] = np.floor(np.log2(1.0 / inst.gamma[pos_mask]) / tau)

    count = math.ceil(params.reps * math.exp(kp))
    best_rsw = 0.0
    best_prefix: tuple[int, ...] = ()
    max_bucket = 1

    def consider(rsw: float, prefix: tuple[int, ...]) -> None:
        nonlocal best_rsw, best_prefix
        if rsw > best_rsw or (rsw == best_rsw and prefix and prefix < best_prefix):
            best_rsw, best_prefix = rsw, prefix

    full_mode = c >= kp - 1
    for coloring in _colorings(n, kp, count, params.seed):
        if full_mode:
            # buckets[(mask, last)][spent capacity] -> (rounded sw, prefix)
            level: dict[tuple[int, int], dict[int, tuple[float, tuple[int, ...]]]] = {}
            for j in range(n):
                entry = (lam[0] * qv[j], (j,))
                level.setdefault((1 << int(coloring[j]), j), {})[0] = entry
                consider(*entry)
            for pos in range(1, kp):
                nxt: dict[tuple[int, int], dict[int, tuple[float, tuple[int, ...]]]] = {}
                for (mask, last), buckets in level.items():
                    for j in range(n):
                        bit = 1 << int(coloring[j])
                        if mask & bit or not math.isfinite(caps[last, j]):
                            continue
                        step = int(caps[last, j])
                        for spent, (rsw, prefix) in buckets.items():
                            spent2 = spent + step
                            if spent2 > budget:
                                continue
                            rchain = 2.0 ** (-tau * (spent2 + pos))
                            rsw2 = rsw + lam[pos] * rchain * qv[j]
                            dest = nxt.setdefault((mask | bit, j), {})
                            cur = dest.get(spent2)
                            prefix2 = prefix + (j,)
                            if (
                                cur is None
                                or rsw2 > cur[0]
                                or (rsw2 == cur[0] and prefix2 < cur[1])
                            ):
                                dest[spent2] = (rsw2, prefix2)
                            consider(rsw2, prefix2)
                for buckets in nxt.values():
                    max_bucket = max(max_bucket, len(buckets))
                level = nxt
        else:
            # window shorter than the prefix: state carries the recent ads and
            # the capacity those ads spend inside the window, nothing else
            state: dict[tuple[int, tuple[int, ...]], tuple[float, tuple[int, ...]]] = {
                (0, ()): (0.0, ())
            }
            for pos in range(kp):
                nxt: dict[tuple[int, tuple[int, ...]], tuple[float, tuple[int, ...]]] = {}
                for (mask, recent), (rsw, prefix) in state.items():
                    for j in range(n):
                        bit = 1 << int(coloring[j])
                        if mask & bit:
                            continue
                        window = recent + (j,)
                        spent = 0.0
                        for a, b in zip(window, window[1:]):
                            spent += caps[a, b]
                        if spent > budget:  # also covers any +inf pair
                            continue
                        rchain = 2.0 ** (-tau * (spent + len(window) - 1))
                        rsw2 = rsw + lam[pos] * rchain * qv[j]
                        key = (mask | bit, window[-min(c, pos + 1) :])
                        cur = nxt.get(key)
                        prefix2 = prefix + (j,)
                        if cur is None or rsw2 > cur[0] or (rsw2 == cur[0] and prefix2 < cur[1]):
                            nxt[key] = (rsw2, prefix2)
                        consider(rsw2, prefix2)
                state = nxt

    theta = allocation_from_ads(best_prefix, k)
    if not return_info:
        return theta
    info = {
        "kprime": kp,
        "tau": tau,
        "budget": budget,
        "max_bucket": max_bucket,
        "rounded_sw": best_rsw,
        "true_sw": social_welfare(inst, theta),
    }
    return theta, info


def fixed_colorings(n: int, ncolors: int, seed: int, reps: int = 3) -> list[np.ndarray]:
    """The deterministic coloring set used by the payment-compatible variant."""
    return _colorings(n, ncolors, math.ceil(reps * math.exp(ncolors)), seed)


def cc_mir_best(inst: Instance, colorings: list[np.ndarray], slots_used: int) -> Allocation:
    """Exact maximum over all allocations colorful under one of ``colorings``.

    No discarding and no rounding happens here, so for a fixed coloring
    set this maximizes true welfare over a fixed allocation range, which
    is what makes it safe to combine with pivot payments.
    """
    best: tuple[float, tuple[int, ...]] | None = None
    for coloring in colorings:
        theta, sw = colorful_dp_exact(inst, coloring, slots_used)
        cand = (sw, theta.slots)
        if best is None or cand[0] > best[0] or (cand[0] == best[0] and cand[1] < best[1]):
            best = cand
    assert best is not None
    return Allocation(best[1])
