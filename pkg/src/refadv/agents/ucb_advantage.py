"""UCB-Advantage: stage-based optimistic Q-learning with a settled reference."""
from __future__ import annotations

import math

import numpy as np

from .._validation import check_positive, check_probability
from ._base import ReferenceAgent


def stage_lengths(H, count):
    """First ``count`` stage lengths and their cumulative ends.

    Lengths start at ``H`` and grow as ``floor((1 + 1/H) * e)``, computed in
    integers as ``e + e // H``.
    """
    if H < 1 or count < 1:
        raise ValueError("H and count must be positive")
    lengths, ends = [], []
    e, total = int(H), 0
    for _ in range(count):
        lengths.append(e)
        total += e
        ends.append(total)
        e += e // H
    return lengths, ends


def stage_ends_upto(H, limit):
    """All stage ends ``<= limit``."""
    ends = []
    e, total = int(H), int(H)
    while total <= limit:
        ends.append(total)
        e += e // H
        total += e
    return ends


def count_stage_ends(H, n_visits):
    return len(stage_ends_upto(H, n_visits))


def _clamp0(x):
    return x if x > 0.0 else 0.0


def compute_bonuses(n, n_stage, mu_ref, sigma_ref, mu_stage, sigma_stage, H, iota,
                    iota_inside_sqrt=False):
    """Reference-advantage bonus ``b`` and stage-only Hoeffding bonus ``b_bar``.

    ``mu_*``/``sigma_*`` are running sums (not means) of first and second
    moments. Sample variances are clamped at zero before the square root.
    """
    var_ref = _clamp0(sigma_ref / n - (mu_ref / n) ** 2)
    var_stage = _clamp0(sigma_stage / n_stage - (mu_stage / n_stage) ** 2)
    if iota_inside_sqrt:
        spread = 2.0 * math.sqrt(var_ref * iota / n) + 2.0 * math.sqrt(var_stage * iota / n_stage)
    else:
        spread = 2.0 * math.sqrt(var_ref / n) * iota + 2.0 * math.sqrt(var_stage / n_stage) * iota
    i34 = iota ** 0.75
    b = spread + 5.0 * (H * iota / n + H * iota / n_stage
                        + H * i34 / n ** 0.75 + H * i34 / n_stage ** 0.75)
    b_bar = 2.0 * math.sqrt(H * H * iota / n_stage)
    return b, b_bar


class UCBAdvantage(ReferenceAgent):
    """Optimistic Q-learning with stage-wise lazy updates.

    Each triple's samples are split into stages of growing length; Q is only
    recomputed when a stage closes, as the minimum of a Hoeffding estimate
    from the last stage, a reference-advantage estimate and the previous
    value. The reference ``Vref[h, s]`` is frozen once ``(s, h)`` has been
    visited ``N0`` times.

    Parameters
    ----------
    beta : float
        Reference accuracy target in ``(0, H]``; enters ``N0``.
    p : float
        Failure probability; ``iota = log(2 / p)``.
    c0 : float
        Constant in ``N0 = c0 * S * A * H**5 * iota / beta**2``.
    n0_override : int, optional
        Use this raw threshold instead of the formula.
    iota_inside_sqrt : bool
        Put ``iota`` under the square roots of ``b`` (Bernstein form).
    tie_break : {"smallest", "largest"}
    """

    def __init__(self, beta=1.0, p=0.01, c0=1.0, n0_override=None,
                 iota_inside_sqrt=False, tie_break="smallest"):
        self.beta = beta
        self.p = p
        self.c0 = c0
        self.n0_override = n0_override
        self.iota_inside_sqrt = iota_inside_sqrt
        self.tie_break = tie_break

    def _initialize(self):
        S, A, H = self.n_states_, self.n_actions_, self.horizon_
        self._check_beta()
        check_probability("p", self.p)
        check_positive("c0", self.c0)
        self.iota_ = math.log(2.0 / self.p)
        if self.n0_override is not None:
            check_positive("n0_override", self.n0_override)
            self.n0_ = int(self.n0_override)
        else:
            self.n0_ = math.ceil(self.c0 * S * A * H ** 5 * self.iota_ / self.beta ** 2)

        remaining = (H - np.arange(H + 1)).astype(float)  # H - h, zero at h = H
        self.Q_ = np.repeat(remaining[:H, None, None], S, axis=1).repeat(A, axis=2)
        self.V_ = np.repeat(remaining[:, None], S, axis=1)
        self.Vref_ = np.full((H + 1, S), float(H))
        self.Vref_[H] = 0.0

        shape = (H, S, A)
        self.n_ = np.zeros(shape, dtype=np.int64)
        self.n_stage_ = np.zeros(shape, dtype=np.int64)
        self.mu_stage_ = np.zeros(shape)
        self.v_stage_ = np.zeros(shape)
        self.sigma_stage_ = np.zeros(shape)
        self.mu_ref_ = np.zeros(shape)
        self.sigma_ref_ = np.zeros(shape)
        self.stage_index_ = np.zeros(shape, dtype=np.int64)
        self.state_visits_ = np.zeros((H, S), dtype=np.int64)
        self.ref_settled_ = np.zeros((H, S), dtype=bool)
        # a triple is visited at most once per episode
        self.stage_ends_ = stage_ends_upto(H, self.n_episodes_)
        self.stage_updates_ = 0

    def observe(self, s, a, h, r, s_next):
        """Record one transition; close the stage and settle the reference if due."""
        v_next = self.V_[h + 1, s_next]
        ref_next = self.Vref_[h + 1, s_next]
        adv = v_next - ref_next
        idx = (h, s, a)
        self.n_[idx] += 1
        self.n_stage_[idx] += 1
        self.mu_stage_[idx] += adv
        self.v_stage_[idx] += v_next
        self.sigma_stage_[idx] += adv * adv
        self.mu_ref_[idx] += ref_next
        self.sigma_ref_[idx] += ref_next * ref_next

        j = self.stage_index_[idx]
        if j < len(self.stage_ends_) and self.n_[idx] == self.stage_ends_[j]:
            self.stage_update_q(s, a, h, r)
            self.stage_index_[idx] = j + 1

        self.state_visits_[h, s] += 1
        self.settle_reference(s, h)

    def stage_update_q(self, s, a, h, r):
        idx = (h, s, a)
        n = int(self.n_[idx])
        n_stage = int(self.n_stage_[idx])
        b, b_bar = compute_bonuses(
            n, n_stage, self.mu_ref_[idx], self.sigma_ref_[idx],
            self.mu_stage_[idx], self.sigma_stage_[idx],
            self.horizon_, self.iota_, self.iota_inside_sqrt,
        )
        q_hoeffding = r + self.v_stage_[idx] / n_stage + b_bar
        q_reference = r + self.mu_ref_[idx] / n + self.mu_stage_[idx] / n_stage + b
        self.Q_[idx] = min(q_hoeffding, q_reference, self.Q_[idx])
        self.V_[h, s] = self.Q_[h, s].max()
        self.n_stage_[idx] = 0
        self.mu_stage_[idx] = 0.0
        self.v_stage_[idx] = 0.0
        self.sigma_stage_[idx] = 0.0
        self.stage_updates_ += 1

    def settle_reference(self, s, h):
        if not self.ref_settled_[h, s] and self.state_visits_[h, s] >= self.n0_:
            self.Vref_[h, s] = self.V_[h, s]
            self.ref_settled_[h, s] = True

    def settled_fraction(self):
        return float(self.ref_settled_.mean())
