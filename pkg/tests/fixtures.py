"""Hand-built counterexample instances on which the approximate solvers
provably misbehave when an advertiser raises its bid.

Each builder re-derives the inequalities its construction relies on and
asserts them, so a silent parameter drift cannot hollow out the tests.
"""

from __future__ import annotations

import math

import numpy as np

from adext.color_coding import ApproxParams, rounded_capacity
from adext.core import Instance, ModelSpec
from adext.w3sp import build_w3sp

# ---------------------------------------------------------------------------
# Color-coding pipeline: K=3, four live ads padded with four dummies so the
# slot truncation K' equals K. Raising ad 2's bid across CC_THRESHOLD flips
# the rounded-welfare argmax from <a1,a3,a2> to <a1,a2,a4>, dropping ad 2's
# true click probability.
# ---------------------------------------------------------------------------

CC_TAU = 1.0
CC_PHI = 0.1
CC_LAM = (1.0, 0.9, 0.8)

CC_THRESHOLD = 2 ** (2 * CC_TAU) * (CC_LAM[1] - CC_LAM[2] * 2 ** (-4 * CC_TAU)) / (
    CC_LAM[1] - CC_LAM[2]
)


def cc_nonmono_params() -> ApproxParams:
    # K' = 3 and tau = log2(1/(1-eps))/K' = 1 require eps = 7/8; the budget
    # floor(log2(1/delta)/tau) must admit the capacity-4 chain <a1,a2,a4>.
    params = ApproxParams(delta=1 / 32, epsilon=7 / 8, seed=7, reps=3)
    assert params.kprime(8, 3) == 3
    assert params.tau(3) == CC_TAU
    assert params.budget(CC_TAU) >= 4
    return params


def cc_nonmono_instance(x: float) -> Instance:
    lam1, lam2, lam3 = CC_LAM
    q1v1 = 2 ** (2 * CC_TAU) * (lam2 - lam3 * 2 ** (-6 * CC_TAU)) / (lam2 - lam3) + 3
    n = 8  # four real ads + four zero-value isolates so ceil(log2 N) = K
    gamma = np.zeros((n, n))
    gamma[0, 1] = 2 ** ((-4 + CC_PHI) * CC_TAU)
    gamma[0, 2] = 2 ** (-CC_TAU)
    gamma[1, 3] = 2 ** (-CC_TAU)
    gamma[2, 1] = 2 ** (-CC_TAU)
    q = np.ones(n)
    v = np.zeros(n)
    v[0], v[1], v[2], v[3] = q1v1, x, 1.0, 1.0
    inst = Instance(
        k=3, q=q, v=v, gamma=gamma,
        lam=[lam1, lam2, lam3 / lam2],
        model=ModelSpec("aa", 3, False),
    )

    # The relations the construction stands on:
    assert np.allclose(inst.lam_cum, CC_LAM)
    # rounded capacities: 3 for the direct hop a1->a2, 1 for the others
    assert rounded_capacity(gamma[0, 1], CC_TAU) == 3
    for i, j in ((0, 2), (1, 3), (2, 1)):
        assert rounded_capacity(gamma[i, j], CC_TAU) == 1
    assert rounded_capacity(0.0, CC_TAU) == math.inf
    # the bid flip must actually lower ad 2's true click probability:
    # slot 3 behind a3 beats slot 2 behind a1 iff Lam2/Lam3 < 2^((2-phi)tau)
    assert lam2 / lam3 < 2 ** ((2 - CC_PHI) * CC_TAU)
    assert lam3 * 2 ** (-2 * CC_TAU) > lam2 * gamma[0, 1]
    return inst


# ---------------------------------------------------------------------------
# Set-packing pipeline: N=K=4, complete graph. The max inside the weight of
# block {a3,a4} switches its within-block order exactly at W3SP_THRESHOLD,
# and the flipped order moves a4 behind a low-externality predecessor.
# ---------------------------------------------------------------------------

W3SP_LAM = (1.0, 1.0, 0.8, 0.7)
W3SP_G34 = 0.9  # = gamma[3][4] and gamma[4][3]
W3SP_GZ4 = 0.1  # externality of a1/a2 on a4

W3SP_THRESHOLD = (W3SP_LAM[3] * W3SP_G34) / (
    W3SP_LAM[2] ** 2 - W3SP_LAM[2] * W3SP_LAM[3] * W3SP_G34
)


def w3sp_nonmono_instance(v4: float) -> Instance:
    lam = W3SP_LAM
    n = 4
    gamma = np.full((n, n), 0.35)
    np.fill_diagonal(gamma, 0.0)
    gamma[0, 1] = gamma[1, 0] = 1.0
    gamma[2, 3] = gamma[3, 2] = W3SP_G34
    gamma[0, 3] = gamma[1, 3] = W3SP_GZ4
    # v3 chosen so the within-block argmax of {a3,a4} flips exactly at the
    # stated threshold: v3 * (Lam3 - Lam4*g43) = threshold * (Lam3 - Lam4*g34)
    v3 = W3SP_THRESHOLD
    v = np.array([500.0, 500.0, v3, v4])
    inst = Instance(
        k=4, q=np.ones(n), v=v, gamma=gamma,
        lam=[1.0, lam[1], lam[2] / lam[1], lam[3] / lam[2]],
        model=ModelSpec("aa", 1, False),
    )

    assert np.allclose(inst.lam_cum, lam)
    # a4 in slot 3 (behind a1 or a2) keeps less attention than in slot 4
    for z in (0, 1):
        assert lam[2] * gamma[z, 3] < lam[3] * gamma[2, 3]
    # the two within-block orders of {a3,a4} tie exactly at the threshold
    arms_at_threshold = w3sp_weight_arms(w3sp_nonmono_raw(v4=W3SP_THRESHOLD), 2, 3, block=2)
    assert abs(arms_at_threshold[0] - arms_at_threshold[1]) < 1e-9
    # the block {a1,a2} dwarfs every other first-block set
    pack = build_w3sp(inst)
    w_top = max(s.weight for s in pack.sets if s.block == 0)
    top = [s for s in pack.sets if s.block == 0 and s.weight == w_top][0]
    assert set(top.ads) == {0, 1}
    return inst


def w3sp_nonmono_raw(v4: float) -> Instance:
    """Same instance without the load-time checks (used by the checks)."""
    lam = W3SP_LAM
    n = 4
    gamma = np.full((n, n), 0.35)
    np.fill_diagonal(gamma, 0.0)
    gamma[0, 1] = gamma[1, 0] = 1.0
    gamma[2, 3] = gamma[3, 2] = W3SP_G34
    gamma[0, 3] = gamma[1, 3] = W3SP_GZ4
    v = np.array([500.0, 500.0, W3SP_THRESHOLD, v4])
    return Instance(
        k=4, q=np.ones(n), v=v, gamma=gamma,
        lam=[1.0, lam[1], lam[2] / lam[1], lam[3] / lam[2]],
        model=ModelSpec("aa", 1, False),
    )


def w3sp_weight_arms(inst: Instance, i: int, j: int, block: int) -> tuple[float, float]:
    lam = inst.lam_cum
    qv = inst.q * inst.v
    return (
        lam[block] * qv[i] + lam[block + 1] * inst.gamma[i, j] * qv[j],
        lam[block] * qv[j] + lam[block + 1] * inst.gamma[j, i] * qv[i],
    )
