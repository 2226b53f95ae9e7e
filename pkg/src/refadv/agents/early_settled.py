"""Q-EarlySettled-Advantage with a tunable settling gap ``beta``."""
from __future__ import annotations

import math

import numpy as np

from .._validation import check_nonnegative, check_probability
from ._base import ReferenceAgent


def learning_rate(n, H):
    """``(H + 1) / (H + n)`` for the ``n``-th visit."""
    if n < 1:
        raise ValueError("visit index starts at 1")
    return (H + 1) / (H + n)


def _clamp0(x):
    return x if x > 0.0 else 0.0


class QEarlySettledAdvantage(ReferenceAgent):
    """Per-visit optimistic Q-learning with UCB/LCB-driven reference settling.

    Three estimates are maintained for each triple: a Hoeffding UCB ``Qucb_``,
    a lower bound ``Qlcb_`` and a reference-advantage estimate ``Qr_``. The
    acted-on ``Q_`` is their running minimum. The reference ``Vr_[h, s]``
    tracks ``V_`` until ``V - Vlcb <= beta`` first holds, then stays fixed.

    Parameters
    ----------
    beta : float
        Settling gap in ``(0, H]``.
    delta : float
        Failure probability; ``iota = log(S * A * T / delta)`` with
        ``T = n_episodes * H`` fixed when the agent is reset.
    c_b : float
        Bonus constant.
    tie_break : {"smallest", "largest"}
    """

    def __init__(self, beta=1.0, delta=0.01, c_b=1.0, tie_break="smallest"):
        self.beta = beta
        self.delta = delta
        self.c_b = c_b
        self.tie_break = tie_break

    def _initialize(self):
        S, A, H = self.n_states_, self.n_actions_, self.horizon_
        self._check_beta()
        check_probability("delta", self.delta)
        check_nonnegative("c_b", self.c_b)
        T = self.n_episodes_ * H
        self.iota_ = math.log(S * A * T / self.delta)

        shape = (H, S, A)
        self.Q_ = np.full(shape, float(H))
        self.Qucb_ = np.full(shape, float(H))
        self.Qr_ = np.full(shape, float(H))
        self.Qlcb_ = np.zeros(shape)
        self.V_ = np.full((H + 1, S), float(H))
        self.V_[H] = 0.0
        self.Vlcb_ = np.zeros((H + 1, S))
        self.Vr_ = np.full((H + 1, S), float(H))
        self.Vr_[H] = 0.0
        self.N_ = np.zeros(shape, dtype=np.int64)
        self.mu_ref_ = np.zeros(shape)
        self.sigma_ref_ = np.zeros(shape)
        self.mu_adv_ = np.zeros(shape)
        self.sigma_adv_ = np.zeros(shape)
        self.delta_r_ = np.zeros(shape)
        self.B_r_ = np.zeros(shape)
        self.u_ = np.ones((H, S), dtype=bool)

    def observe(self, s, a, h, r, s_next):
        idx = (h, s, a)
        self.N_[idx] += 1
        n = int(self.N_[idx])
        self.update_ucb_q(s, a, h, r, s_next, n)
        self.update_lcb_q(s, a, h, r, s_next, n)
        self.update_ucb_advantage(s, a, h, r, s_next, n)
        self.combine_and_settle(s, a, h)

    def _hoeffding_bonus(self, n):
        return self.c_b * math.sqrt(self.horizon_ ** 3 * self.iota_ / n)

    def update_ucb_q(self, s, a, h, r, s_next, n):
        eta = learning_rate(n, self.horizon_)
        target = r + self.V_[h + 1, s_next] + self._hoeffding_bonus(n)
        self.Qucb_[h, s, a] = (1 - eta) * self.Qucb_[h, s, a] + eta * target

    def update_lcb_q(self, s, a, h, r, s_next, n):
        eta = learning_rate(n, self.horizon_)
        target = r + self.Vlcb_[h + 1, s_next] - self._hoeffding_bonus(n)
        self.Qlcb_[h, s, a] = (1 - eta) * self.Qlcb_[h, s, a] + eta * target

    def update_moments(self, s, a, h, s_next, n):
        idx = (h, s, a)
        eta = learning_rate(n, self.horizon_)
        ref = self.Vr_[h + 1, s_next]
        adv = self.V_[h + 1, s_next] - ref
        w = 1.0 / n
        self.mu_ref_[idx] = (1 - w) * self.mu_ref_[idx] + w * ref
        self.sigma_ref_[idx] = (1 - w) * self.sigma_ref_[idx] + w * ref * ref
        self.mu_adv_[idx] = (1 - eta) * self.mu_adv_[idx] + eta * adv
        self.sigma_adv_[idx] = (1 - eta) * self.sigma_adv_[idx] + eta * adv * adv

    def update_bonus(self, s, a, h, n):
        idx = (h, s, a)
        var_ref = _clamp0(self.sigma_ref_[idx] - self.mu_ref_[idx] ** 2)
        var_adv = _clamp0(self.sigma_adv_[idx] - self.mu_adv_[idx] ** 2)
        b_next = self.c_b * math.sqrt(self.iota_ / n) * (
            math.sqrt(var_ref) + math.sqrt(self.horizon_) * math.sqrt(var_adv)
        )
        self.delta_r_[idx] = b_next - self.B_r_[idx]
        self.B_r_[idx] = b_next
        return self.delta_r_[idx], b_next

    def update_ucb_advantage(self, s, a, h, r, s_next, n):
        idx = (h, s, a)
        H = self.horizon_
        eta = learning_rate(n, H)
        self.update_moments(s, a, h, s_next, n)
        delta_r, B_r = self.update_bonus(s, a, h, n)
        bonus = B_r + (1 - eta) * delta_r / eta + self.c_b * H * H * self.iota_ / n ** 0.75
        target = (r + self.V_[h + 1, s_next] - self.Vr_[h + 1, s_next]
                  + self.mu_ref_[idx] + bonus)
        self.Qr_[idx] = (1 - eta) * self.Qr_[idx] + eta * target

    def combine_and_settle(self, s, a, h):
        idx = (h, s, a)
        self.Q_[idx] = min(self.Qr_[idx], self.Qucb_[idx], self.Q_[idx])
        self.V_[h, s] = self.Q_[h, s].max()
        self.Vlcb_[h, s] = max(self.Qlcb_[h, s].max(), self.Vlcb_[h, s])
        if self.V_[h, s] - self.Vlcb_[h, s] > self.beta:
            self.Vr_[h, s] = self.V_[h, s]
        elif self.u_[h, s]:
            self.Vr_[h, s] = self.V_[h, s]
            self.u_[h, s] = False

    def settled_fraction(self):
        return float(1.0 - self.u_.mean())
