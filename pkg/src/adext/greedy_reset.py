"""Half-approximate greedy for reset instances, and a payment-friendly one.

With reset, an empty slot restores full attention, so placing ads only in
odd slots decouples them completely: each contributes Lam_odd * q * v no
matter who else is shown. Sorting by q*v and filling the odd slots is
therefore the exact maximum over the even-slots-empty range, and that
range is rich enough to always capture half the unrestricted optimum.
"""

from __future__ import annotations

from .core import BOT, Allocation, Instance, ModelError


def greedy_half(inst: Instance) -> Allocation:
    """Top ceil(K/2) ads by q*v in slots 1,3,5,...; even slots left empty.

    Ties in q*v break toward the smaller ad index, which keeps the
    allocation (and any payments derived from it) deterministic.
    """
    if not inst.reset:
        raise ModelError("the odd-slot greedy requires the reset model")
    qv = inst.q * inst.v
    order = sorted(range(inst.n), key=lambda i: (-qv[i], i))
    n_odd = (inst.k + 1) // 2
    slots = [BOT] * inst.k
    for rank, ad in enumerate(order[:n_odd]):
        slots[2 * rank] = ad
    return Allocation(tuple(slots))


def odd_slot_range(inst: Instance):
    """Every allocation with even slots empty (desk-scale enumeration)."""
    from itertools import combinations, permutations

    odd_slots = list(range(0, inst.k, 2))
    for size in range(min(len(odd_slots), inst.n) + 1):
        for chosen in combinations(odd_slots, size):
            for ads in permutations(range(inst.n), size):
                slots = [BOT] * inst.k
                for slot, ad in zip(chosen, ads):
                    slots[slot] = ad
                yield Allocation(tuple(slots))
