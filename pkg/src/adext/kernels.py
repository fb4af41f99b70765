"""Hot numeric kernels: batch welfare evaluation and exhaustive search.

Allocations are encoded here as integer matrices with ads 0..N-1 and the
empty slot as index N, so externality lookups become plain array indexing
into matrices extended by one BOT row/column. The public wrappers in
:mod:`adext.oracle` translate to and from the BOT=-1 convention.

Every kernel has a numba and a numpy implementation with identical
enumeration order (lexicographic, empty slot sorting last), selected via
:mod:`adext.backend`.
"""

from __future__ import annotations

import numpy as np

from .backend import HAS_NUMBA
from .core import BOT, Allocation, Instance

if HAS_NUMBA:
    from numba import njit
else:  # identity decorator so the same source defines the numpy-only build
    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


# ---------------------------------------------------------------------------
# Encoding helpers
# ---------------------------------------------------------------------------

def extended_tables(inst: Instance) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(q_ext, v_ext, lam_cum, gamma_ext) with index N acting as the empty slot."""
    n = inst.n
    bot = inst.bot_weight()
    q_ext = np.zeros(n + 1)
    v_ext = np.zeros(n + 1)
    q_ext[:n] = inst.q
    v_ext[:n] = inst.v
    if inst.model.kind == "aa":
        g_ext = np.full((n + 1, n + 1), bot)
        g_ext[:n, :n] = inst.gamma
    else:
        g_ext = np.empty((inst.k, n + 1))
        g_ext[:, :n] = inst.gamma
        g_ext[:, n] = bot
    return q_ext, v_ext, np.asarray(inst.lam_cum), g_ext


def encode_allocation(inst: Instance, theta: Allocation) -> np.ndarray:
    return np.array([inst.n if s == BOT else s for s in theta.slots], dtype=np.int64)


def decode_allocation(inst: Instance, digits: np.ndarray) -> Allocation:
    return Allocation(tuple(BOT if d == inst.n else int(d) for d in digits))


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------

@njit(cache=True)
def _sw_batch_aa_nb(thetas, q_ext, v_ext, lam_cum, gamma_ext, window):
    m, k = thetas.shape
    out = np.empty(m)
    for r in range(m):
        sw = 0.0
        for pos in range(k):
            ad = thetas[r, pos]
            if v_ext[ad] == 0.0 and q_ext[ad] == 0.0:
                continue
            g = lam_cum[pos]
            lo = pos - window
            if lo < 0:
                lo = 0
            for l in range(lo, pos):
                g *= gamma_ext[thetas[r, l], thetas[r, l + 1]]
            sw += q_ext[ad] * g * v_ext[ad]
        out[r] = sw
    return out


@njit(cache=True)
def _sw_batch_sa_nb(thetas, q_ext, v_ext, gamma_ext, window):
    m, k = thetas.shape
    out = np.empty(m)
    for r in range(m):
        sw = 0.0
        for pos in range(k):
            ad = thetas[r, pos]
            if v_ext[ad] == 0.0 and q_ext[ad] == 0.0:
                continue
            g = 1.0
            lo = pos - window
            if lo < 0:
                lo = 0
            for l in range(lo, pos):
                g *= gamma_ext[l, thetas[r, l]]
            sw += q_ext[ad] * g * v_ext[ad]
        out[r] = sw
    return out


@njit(cache=True)
def _search_nb(n, k, window, q_ext, v_ext, lam_cum, gamma_ext, is_aa, allow_bot):
    """Scan every length-k sequence; return (best digits, best sw, feasible count)."""
    base = n + 1 if allow_bot else n
    total = base**k
    best = np.full(k, n, dtype=np.int64)
    best_sw = -1.0
    count = 0
    digits = np.empty(k, dtype=np.int64)
    for lin in range(total):
        rem = lin
        for pos in range(k - 1, -1, -1):
            digits[pos] = rem % base
            rem //= base
        feasible = True
        for a in range(k):
            if digits[a] == n:
                continue
            for b in range(a + 1, k):
                if digits[b] == digits[a]:
                    feasible = False
                    break
            if not feasible:
                break
        if not feasible:
            continue
        count += 1
        sw = 0.0
        for pos in range(k):
            ad = digits[pos]
            if ad == n:
                continue
            if is_aa:
                g = lam_cum[pos]
                lo = pos - window
                if lo < 0:
                    lo = 0
                for l in range(lo, pos):
                    g *= gamma_ext[digits[l], digits[l + 1]]
            else:
                g = 1.0
                lo = pos - window
                if lo < 0:
                    lo = 0
                for l in range(lo, pos):
                    g *= gamma_ext[l, digits[l]]
            sw += q_ext[ad] * g * v_ext[ad]
        if sw > best_sw:
            best_sw = sw
            best[:] = digits
    return best, best_sw, count


# ---------------------------------------------------------------------------
# numpy twins
# ---------------------------------------------------------------------------

def _sw_batch_aa_np(thetas, q_ext, v_ext, lam_cum, gamma_ext, window):
    m, k = thetas.shape
    sw = np.zeros(m)
    pair = [gamma_ext[thetas[:, l], thetas[:, l + 1]] for l in range(k - 1)]
    for pos in range(k):
        g = np.full(m, lam_cum[pos])
        for l in range(max(0, pos - window), pos):
            g = g * pair[l]
        sw += q_ext[thetas[:, pos]] * g * v_ext[thetas[:, pos]]
    return sw


def _sw_batch_sa_np(thetas, q_ext, v_ext, gamma_ext, window):
    m, k = thetas.shape
    sw = np.zeros(m)
    fac = [gamma_ext[l, thetas[:, l]] for l in range(k)]
    for pos in range(k):
        g = np.ones(m)
        for l in range(max(0, pos - window), pos):
            g = g * fac[l]
        sw += q_ext[thetas[:, pos]] * g * v_ext[thetas[:, pos]]
    return sw


_CHUNK = 1 << 16


def _search_np(n, k, window, q_ext, v_ext, lam_cum, gamma_ext, is_aa, allow_bot):
    base = n + 1 if allow_bot else n
    total = base**k
    weights = base ** np.arange(k - 1, -1, -1, dtype=np.int64)
    best = np.full(k, n, dtype=np.int64)
    best_sw = -1.0
    count = 0
    for start in range(0, total, _CHUNK):
        lin = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        digits = (lin[:, None] // weights[None, :]) % base
        feasible = np.ones(len(lin), dtype=bool)
        for a in range(k):
            real_a = digits[:, a] != n
            for b in range(a + 1, k):
                feasible &= ~(real_a & (digits[:, b] == digits[:, a]))
        if not feasible.any():
            continue
        digits = digits[feasible]
        count += len(digits)
        if is_aa:
            sw = _sw_batch_aa_np(digits, q_ext, v_ext, lam_cum, gamma_ext, window)
        else:
            sw = _sw_batch_sa_np(digits, q_ext, v_ext, gamma_ext, window)
        i = int(np.argmax(sw))
        if sw[i] > best_sw:
            best_sw = float(sw[i])
            best = digits[i].copy()
    return best, best_sw, count


# ---------------------------------------------------------------------------
# dispatching wrappers
# ---------------------------------------------------------------------------

def social_welfare_batch(inst: Instance, thetas: np.ndarray) -> np.ndarray:
    """Welfare of each encoded allocation row (ads 0..N-1, empty slot = N)."""
    q_ext, v_ext, lam_cum, g_ext = extended_tables(inst)
    thetas = np.ascontiguousarray(thetas, dtype=np.int64)
    if inst.model.kind == "aa":
        fn = _sw_batch_aa_nb if HAS_NUMBA else _sw_batch_aa_np
        return fn(thetas, q_ext, v_ext, lam_cum, g_ext, inst.window)
    fn = _sw_batch_sa_nb if HAS_NUMBA else _sw_batch_sa_np
    return fn(thetas, q_ext, v_ext, g_ext, inst.window)


def search_best(inst: Instance, allow_bot: bool) -> tuple[np.ndarray, float, int]:
    """Exhaustive argmax over all feasible length-K sequences.

    Enumeration is lexicographic with the empty slot ordered after every
    real ad, and the first maximum wins, so ties resolve to the
    lexicographically smallest slot sequence on both backends.
    """
    q_ext, v_ext, lam_cum, g_ext = extended_tables(inst)
    fn = _search_nb if HAS_NUMBA else _search_np
    return fn(
        inst.n,
        inst.k,
        inst.window,
        q_ext,
        v_ext,
        lam_cum,
        g_ext,
        inst.model.kind == "aa",
        allow_bot,
    )
