from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .._validation import check_beta, check_tie_break


def greedy(row, tie_break="smallest"):
    """Argmax of a 1-d Q row under a deterministic tie-break rule."""
    if tie_break == "smallest":
        return int(np.argmax(row))
    return int(len(row) - 1 - np.argmax(row[::-1]))


class TabularAgent(BaseEstimator):
    """Common surface of the online agents.

    Subclasses allocate their tables in ``_initialize`` and implement
    ``observe``. The engine drives an agent through ``reset``,
    ``select_action`` and ``observe``; ``fit`` is a convenience wrapper that
    runs a whole experiment and keeps the resulting record.
    """

    # attribute names holding the greedy Q table and (optionally) V/VLCB
    _q_attr = "Q_"

    def reset(self, S, A, H, n_episodes):
        """Allocate fresh state for an ``(S, A, H)`` problem and ``n_episodes``."""
        if min(S, A, H, n_episodes) < 1:
            raise ValueError("S, A, H and n_episodes must be positive")
        check_tie_break(self.tie_break)
        self.n_states_, self.n_actions_, self.horizon_ = int(S), int(A), int(H)
        self.n_episodes_ = int(n_episodes)
        self._initialize()
        return self

    def _initialize(self):
        raise NotImplementedError

    def observe(self, s, a, h, r, s_next):
        raise NotImplementedError

    @property
    def q_table(self):
        return getattr(self, self._q_attr)

    def select_action(self, s, h):
        return greedy(self.q_table[h, s], self.tie_break)

    def greedy_policy(self):
        """Full ``(H, S)`` action table implied by the current Q estimates."""
        Q = self.q_table
        if self.tie_break == "smallest":
            return np.argmax(Q, axis=2)
        return Q.shape[2] - 1 - np.argmax(Q[:, :, ::-1], axis=2)

    def settled_fraction(self):
        return 0.0

    def fit(self, mdp, n_episodes, random_state=None):
        """Learn online on ``mdp`` for ``n_episodes`` episodes.

        The episode-level record is stored as ``record_``.
        """
        from ..engine import run_agent

        self.record_ = run_agent(mdp, self, n_episodes, random_state=random_state)
        return self

    def predict(self, X):
        """Greedy actions for rows of ``(h, s)`` pairs."""
        check_is_fitted(self, "n_states_")
        X = np.asarray(X, dtype=int)
        if X.ndim != 2 or X.shape[1] != 2:
            raise ValueError("X must have shape (n_samples, 2) holding (h, s) pairs")
        if X.size and (X.min() < 0 or X[:, 0].max() >= self.horizon_
                       or X[:, 1].max() >= self.n_states_):
            raise ValueError("(h, s) pair outside the fitted problem")
        policy = self.greedy_policy()
        return policy[X[:, 0], X[:, 1]]


class ReferenceAgent(TabularAgent):
    """Agents parameterised by the reference-settling threshold ``beta``."""

    def _check_beta(self):
        check_beta(self.beta, self.horizon_)
