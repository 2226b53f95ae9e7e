"""Q-Hoeffding comparator: the UCB estimate on its own."""
from __future__ import annotations

import math

import numpy as np

from .._validation import check_nonnegative, check_probability
from ._base import TabularAgent
from .early_settled import learning_rate


class QHoeffding(TabularAgent):
    """Optimistic Q-learning with a Hoeffding bonus and clipped values.

    ``V[h, s] = min(H - h, max_a Q[h, s, a])`` with 0-indexed ``h``. Unlike
    the advantage agents, ``Q`` is overwritten on every visit, so it is not
    monotone.
    """

    def __init__(self, delta=0.01, c_b=1.0, tie_break="smallest"):
        self.delta = delta
        self.c_b = c_b
        self.tie_break = tie_break

    def _initialize(self):
        S, A, H = self.n_states_, self.n_actions_, self.horizon_
        check_probability("delta", self.delta)
        check_nonnegative("c_b", self.c_b)
        self.iota_ = math.log(S * A * self.n_episodes_ * H / self.delta)
        self.cap_ = (H - np.arange(H + 1)).astype(float)
        self.Q_ = np.full((H, S, A), float(H))
        self.V_ = np.repeat(np.minimum(self.cap_, float(H))[:, None], S, axis=1)
        self.N_ = np.zeros((H, S, A), dtype=np.int64)

    def observe(self, s, a, h, r, s_next):
        self.N_[h, s, a] += 1
        self.hoeffding_update(s, a, h, r, s_next, int(self.N_[h, s, a]))

    def hoeffding_update(self, s, a, h, r, s_next, n):
        H = self.horizon_
        eta = learning_rate(n, H)
        bonus = self.c_b * math.sqrt(H ** 3 * self.iota_ / n)
        target = r + self.V_[h + 1, s_next] + bonus
        self.Q_[h, s, a] = (1 - eta) * self.Q_[h, s, a] + eta * target
        self.V_[h, s] = min(self.cap_[h], self.Q_[h, s].max())
