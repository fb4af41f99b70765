"""Reduction to weighted 3-set packing for dense contextual graphs.

Slots are split into two-slot blocks. A packing set couples one or two
ads with a block and carries the best welfare the block can produce in
isolation; a disjoint packing then maps straight back to an allocation.
Because every pair of ads has externality at least gamma_min > 0, the
welfare lost to cross-block effects is bounded, so an a-approximate
packing yields an (a * gamma_min^c)-approximate allocation.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .core import BOT, Allocation, Instance, ModelError


@dataclass(frozen=True)
class PackSet:
    """One or two ads tied to the block starting at slot ``block`` (0-based,
    even). ``order`` is the within-block placement achieving ``weight``."""

    ads: tuple[int, ...]
    block: int
    weight: float
    order: tuple[int, ...]


@dataclass(frozen=True)
class PackingInstance:
    sets: tuple[PackSet, ...]
    n_ads: int
    blocks: tuple[int, ...]


@dataclass(frozen=True)
class Packing:
    chosen: tuple[PackSet, ...]

    @property
    def weight(self) -> float:
        return sum(s.weight for s in self.chosen)


def min_offdiag_gamma(inst: Instance) -> float:
    n = inst.n
    mask = ~np.eye(n, dtype=bool)
    return float(inst.gamma[mask].min()) if n > 1 else 1.0


def _require_dense(inst: Instance) -> None:
    if inst.model.kind != "aa" or inst.reset:
        raise ModelError("the packing reduction applies to aa no-reset instances")
    if inst.n > 1 and min_offdiag_gamma(inst) <= 0.0:
        raise ModelError("the packing reduction needs a complete contextual graph "
                         "(every off-diagonal externality positive)")


def build_w3sp(inst: Instance) -> PackingInstance:
    """Pair sets for every (two ads, block), singletons for every (ad, block).

    Pair weight takes the better of the two within-block orders; the final
    block of an odd K has one slot and gets singletons only. Singletons let
    a block hold a lone ad, which only ever adds welfare.
    """
    _require_dense(inst)
    qv = inst.q * inst.v
    lam = inst.lam_cum
    sets: list[PackSet] = []
    blocks = tuple(range(0, inst.k, 2))
    for p in blocks:
        full = p + 1 < inst.k
        if full:
            for i, j in combinations(range(inst.n), 2):
                w_ij = lam[p] * qv[i] + lam[p + 1] * inst.gamma[i, j] * qv[j]
                w_ji = lam[p] * qv[j] + lam[p + 1] * inst.gamma[j, i] * qv[i]
                if w_ij >= w_ji:
                    sets.append(PackSet((i, j), p, w_ij, (i, j)))
                else:
                    sets.append(PackSet((i, j), p, w_ji, (j, i)))
        for i in range(inst.n):
            sets.append(PackSet((i,), p, lam[p] * qv[i], (i,)))
    return PackingInstance(sets=tuple(sets), n_ads=inst.n, blocks=blocks)


def _disjoint(s: PackSet, used_ads: set[int], used_blocks: set[int]) -> bool:
    return s.block not in used_blocks and not any(a in used_ads for a in s.ads)


def solve_w3sp(p: PackingInstance, method: str = "greedy") -> Packing:
    """Greedy by weight (a 1/3-approximation), optionally polished by local
    search that swaps up to two chosen sets for one heavier insertion."""
    if method not in ("greedy", "local_search", "local"):
        raise ValueError(f"unknown packing method {method!r}")
    ranked = sorted(range(len(p.sets)), key=lambda idx: (-p.sets[idx].weight, idx))
    chosen: list[PackSet] = []
    used_ads: set[int] = set()
    used_blocks: set[int] = set()
    for idx in ranked:
        s = p.sets[idx]
        if _disjoint(s, used_ads, used_blocks):
            chosen.append(s)
            used_ads.update(s.ads)
            used_blocks.add(s.block)

    if method != "greedy":
        improved = True
        while improved:
            improved = False
            for s in p.sets:
                if s in chosen:
                    continue
                clash = [t for t in chosen if t.block == s.block or set(t.ads) & set(s.ads)]
                if len(clash) <= 2 and s.weight > sum(t.weight for t in clash):
                    chosen = [t for t in chosen if t not in clash] + [s]
                    improved = True
    chosen.sort(key=lambda s: s.block)
    return Packing(chosen=tuple(chosen))


def realize(inst: Instance, packing: Packing) -> Allocation:
    slots = [BOT] * inst.k
    for s in packing.chosen:
        for off, ad in enumerate(s.order):
            slots[s.block + off] = ad
    return Allocation(tuple(slots))


def allocate_via_w3sp(inst: Instance, method: str = "greedy") -> Allocation:
    """Build the packing instance, pack, and realize block by block."""
    return realize(inst, solve_w3sp(build_w3sp(inst), method))
