"""Auction model: instances, allocations, and welfare evaluation.

An instance describes N ads competing for K ordered slots. Each ad has a
click quality ``q`` and a valuation ``v``. How much attention survives from
one slot to the next is governed by externality weights:

* ``aa`` (ad-ad): a factorized per-slot prominence ``lam`` plus a weight
  matrix ``gamma[i][j]`` giving the attention ad *i* passes to ad *j* shown
  directly below it.
* ``sa`` (slot-ad): no factorization; ``gamma[m][j]`` is the attention that
  survives slot *m* when ad *j* occupies it.

Externalities act forward only, within a window of ``window`` slots above
the ad. Empty slots either restore attention (``reset=True``: weights
involving the empty slot are 1) or kill it (``reset=False``: they are 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

#: Sentinel marking an empty slot inside an allocation.
BOT = -1

KIND_AA = "aa"
KIND_SA = "sa"


class ModelError(ValueError):
    """Raised when an operation is applied to an incompatible model variant."""


@dataclass(frozen=True)
class ModelSpec:
    """Which externality family applies: kind ('aa'|'sa'), window, reset flag."""

    kind: str
    window: int
    reset: bool

    def __post_init__(self) -> None:
        if self.kind not in (KIND_AA, KIND_SA):
            raise ModelError(f"unknown model kind {self.kind!r}")


@dataclass(frozen=True)
class Instance:
    """A full auction instance.

    ``lam`` is the per-slot prominence vector (aa only, ``lam[0] == 1``);
    ``gamma`` is (N, N) for aa models and (K, N) for sa models. Arrays are
    frozen after construction; instances are safe to share between threads.
    """

    k: int
    q: np.ndarray
    v: np.ndarray
    gamma: np.ndarray
    model: ModelSpec
    lam: np.ndarray | None = None
    lam_cum: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        q = np.asarray(self.q, dtype=np.float64)
        v = np.asarray(self.v, dtype=np.float64)
        gamma = np.asarray(self.gamma, dtype=np.float64)
        for name, arr in (("q", q), ("v", v), ("gamma", gamma)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.lam is not None:
            lam = np.asarray(self.lam, dtype=np.float64)
            lam.setflags(write=False)
            object.__setattr__(self, "lam", lam)
            lam_cum = np.cumprod(lam)
        else:
            # sa models carry no prominence vector; slot weight is implicit 1
            lam_cum = np.ones(self.k)
        lam_cum.setflags(write=False)
        object.__setattr__(self, "lam_cum", lam_cum)

    @property
    def n(self) -> int:
        return len(self.q)

    @property
    def window(self) -> int:
        return self.model.window

    @property
    def reset(self) -> bool:
        return self.model.reset

    def bot_weight(self) -> float:
        """Externality weight of any pair involving an empty slot."""
        return 1.0 if self.model.reset else 0.0

    def pair_gamma(self, above: int, below: int) -> float:
        """aa weight between consecutive slot contents (BOT-aware)."""
        if above == BOT or below == BOT:
            return self.bot_weight()
        return float(self.gamma[above, below])

    def slot_gamma(self, slot: int, ad: int) -> float:
        """sa weight exerted by ``slot`` when it shows ``ad`` (BOT-aware)."""
        if ad == BOT:
            return self.bot_weight()
        return float(self.gamma[slot, ad])


@dataclass(frozen=True)
class Allocation:
    """An ordered assignment of ads to the K slots, top to bottom.

    Entries are ad indices (0-based) or BOT for an empty slot. Ads not
    listed are simply not shown and have click probability 0.
    """

    slots: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "slots", tuple(int(s) for s in self.slots))

    def ads(self) -> tuple[int, ...]:
        """The real ads present, in slot order."""
        return tuple(s for s in self.slots if s != BOT)

    def position_of(self, ad: int) -> int | None:
        try:
            return self.slots.index(ad)
        except ValueError:
            return None


def allocation_from_ads(ads: Iterable[int], k: int) -> Allocation:
    """Place ``ads`` contiguously from the top slot, padding with BOT."""
    ads = list(ads)
    if len(ads) > k:
        raise ValueError(f"{len(ads)} ads do not fit in {k} slots")
    return Allocation(tuple(ads) + (BOT,) * (k - len(ads)))


def validate_instance(inst: Instance) -> list[str]:
    """Return every invariant violation (empty list means well-formed)."""
    bad: list[str] = []
    n, k = inst.n, inst.k
    if k < 1:
        bad.append("slot count must be positive")
    if n < 1:
        bad.append("ad count must be positive")
    if len(inst.v) != n:
        bad.append(f"v has length {len(inst.v)}, expected {n}")
    if np.any(inst.q < 0) or np.any(inst.q > 1):
        bad.append("quality out of [0,1]")
    if np.any(inst.v < 0):
        bad.append("valuation must be nonnegative")
    if not 1 <= inst.model.window <= max(k, 1):
        bad.append(f"window {inst.model.window} out of [1,{k}]")
    if inst.model.kind == KIND_AA:
        if inst.lam is None:
            bad.append("aa model requires a lam vector")
        else:
            if len(inst.lam) != k:
                bad.append(f"lam has length {len(inst.lam)}, expected {k}")
            elif inst.lam[0] != 1.0:
                bad.append("lam[1] must equal 1")
            if np.any(inst.lam < 0) or np.any(inst.lam > 1):
                bad.append("lam out of [0,1]")
        if inst.gamma.shape != (n, n):
            bad.append(f"aa gamma must be ({n},{n}), got {inst.gamma.shape}")
    else:
        if inst.lam is not None:
            bad.append("sa model must not carry a lam vector")
        if inst.gamma.shape != (k, n):
            bad.append(f"sa gamma must be ({k},{n}), got {inst.gamma.shape}")
    if np.any(inst.gamma < 0) or np.any(inst.gamma > 1):
        bad.append("gamma out of [0,1]")
    return bad


def validate_allocation(inst: Instance, theta: Allocation) -> None:
    """Raise ValueError unless ``theta`` is feasible for ``inst``."""
    if len(theta.slots) != inst.k:
        raise ValueError(f"allocation has {len(theta.slots)} slots, expected {inst.k}")
    seen: set[int] = set()
    for s in theta.slots:
        if s == BOT:
            continue
        if not 0 <= s < inst.n:
            raise ValueError(f"ad index {s} out of range")
        if s in seen:
            raise ValueError(f"ad {s} allocated twice")
        seen.add(s)


def attention(inst: Instance, theta: Allocation, pos: int) -> float:
    """Externality multiplier of the ad at slot ``pos`` (quality excluded)."""
    c = inst.window
    if inst.model.kind == KIND_AA:
        g = float(inst.lam_cum[pos])
        for l in range(max(0, pos - c), pos):
            g *= inst.pair_gamma(theta.slots[l], theta.slots[l + 1])
    else:
        g = 1.0
        for m in range(max(0, pos - c), pos):
            g *= inst.slot_gamma(m, theta.slots[m])
    return g


def eval_ctr(inst: Instance, theta: Allocation, ad: int) -> float:
    """Click probability of ``ad`` under ``theta`` (0 if not shown)."""
    if not 0 <= ad < inst.n:
        raise ValueError(f"ad index {ad} out of range")
    validate_allocation(inst, theta)
    pos = theta.position_of(ad)
    if pos is None:
        return 0.0
    return float(inst.q[ad]) * attention(inst, theta, pos)


def social_welfare(inst: Instance, theta: Allocation) -> float:
    """Total expected value of ``theta``: sum of CTR_i * v_i over shown ads."""
    validate_allocation(inst, theta)
    sw = 0.0
    for pos, ad in enumerate(theta.slots):
        if ad == BOT:
            continue
        sw += float(inst.q[ad]) * attention(inst, theta, pos) * float(inst.v[ad])
    return sw


def prune_zero_pairs(inst: Instance, theta: Allocation) -> Allocation:
    """Blank out the upper ad of every adjacent pair with zero externality.

    Applies top-down and repeats until no real-real pair with gamma 0 is
    left. On its intended instance class (aa, window 1, reset, binary
    weights, unit prominence and unit q*v) the rewrite provably keeps the
    welfare unchanged, which is verified before returning.
    """
    if inst.model.kind != KIND_AA:
        raise ModelError("zero-pair pruning is defined for aa models")
    if inst.window != 1 or not inst.reset:
        raise ModelError("zero-pair pruning requires window 1 and the reset model")
    if not np.all(np.isin(inst.gamma, (0.0, 1.0))):
        raise ModelError("zero-pair pruning requires binary externalities")
    validate_allocation(inst, theta)

    slots = list(theta.slots)
    changed = True
    while changed:
        changed = False
        for l in range(len(slots) - 1):
            a, b = slots[l], slots[l + 1]
            if a != BOT and b != BOT and inst.gamma[a, b] == 0.0:
                slots[l] = BOT
                changed = True
                break
    pruned = Allocation(tuple(slots))
    before, after = social_welfare(inst, theta), social_welfare(inst, pruned)
    if abs(before - after) > 1e-12:
        raise ValueError(
            f"pruning changed welfare from {before} to {after}; "
            "instance is outside the class where the rewrite is exact"
        )
    return pruned
