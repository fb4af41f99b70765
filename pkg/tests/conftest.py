"""Shared suite builders: seeded, grid-valued random instances."""

from __future__ import annotations

import numpy as np
import pytest

from adext.core import Instance, ModelSpec
from adext.harness import GenParams, gen_random


def draw_aa(rng: np.random.Generator, n_lo=2, n_hi=7, k_lo=1, k_hi=5, *,
            graph="random", reset=False, window="full", density=0.6,
            gamma_min=0.2) -> Instance:
    """One random ad-ad instance with sizes drawn from the given ranges."""
    n = int(rng.integers(n_lo, n_hi + 1))
    k = int(rng.integers(k_lo, k_hi + 1))
    if window == "full":
        w = k
    elif window == "random":
        w = int(rng.integers(1, k + 1))
    else:
        w = min(int(window), k)
    return gen_random(GenParams(
        n=n, k=k, kind="aa", window=w, reset=reset, graph=graph,
        density=density, gamma_min=gamma_min, seed=int(rng.integers(2**31)),
    ))


def draw_sa(rng: np.random.Generator, n_lo=2, n_hi=7, k_lo=1, k_hi=5,
            windows=(1, 2), resets=(False, True)) -> Instance:
    n = int(rng.integers(n_lo, n_hi + 1))
    k = int(rng.integers(k_lo, k_hi + 1))
    w_choices = [w for w in windows if w <= max(1, k - 1)] or [1]
    w = int(rng.choice(w_choices))
    reset = bool(rng.choice(resets))
    return gen_random(GenParams(
        n=n, k=k, kind="sa", window=min(w, k), reset=reset,
        seed=int(rng.integers(2**31)),
    ))


@pytest.fixture
def inst1() -> Instance:
    """Two ads, two slots, no reset, full window; hand-checkable numbers."""
    return Instance(
        k=2, q=[1, 1], v=[2, 1],
        gamma=[[0, 0.5], [1, 0]],
        lam=[1, 0.5],
        model=ModelSpec("aa", 2, False),
    )
