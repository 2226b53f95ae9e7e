"""Tabular episodic MDPs: container, validation, exact solution, generators.

Steps are 0-indexed throughout: ``h = 0 .. H-1`` addresses the arrays
``rewards[h, s, a]`` and ``transitions[h, s, a, s']``. Value tables carry an
extra terminal row, so ``V[H]`` is identically zero.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import (
    BadDimensions,
    DegenerateMdp,
    GenerationFailed,
    RewardOutOfRange,
    RowNotStochastic,
)

ROW_TOL = 1e-9
TIE_TOL = 1e-9

FAMILIES = ("random_stochastic", "deterministic_chain", "unique_optimal")


@dataclass(frozen=True, eq=False)
class MdpSpec:
    """A finite-horizon tabular MDP with deterministic rewards."""

    S: int
    A: int
    H: int
    rewards: np.ndarray  # (H, S, A)
    transitions: np.ndarray  # (H, S, A, S)
    initial_state_dist: np.ndarray  # (S,)

    @property
    def shape(self):
        return (self.H, self.S, self.A)

    def to_dict(self):
        return {
            "S": self.S,
            "A": self.A,
            "H": self.H,
            "rewards": np.asarray(self.rewards).tolist(),
            "transitions": np.asarray(self.transitions).tolist(),
            "initial_state_dist": np.asarray(self.initial_state_dist).tolist(),
        }

    def to_json(self, indent=None):
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, doc):
        try:
            S, A, H = int(doc["S"]), int(doc["A"]), int(doc["H"])
        except KeyError as exc:
            raise BadDimensions(f"missing dimension field {exc.args[0]!r}") from None
        except (TypeError, ValueError):
            raise BadDimensions("S, A, H must be integers") from None
        for key in ("rewards", "transitions", "initial_state_dist"):
            if key not in doc:
                raise BadDimensions(f"missing field {key!r}")
        try:
            rewards = np.array(doc["rewards"], dtype=float)
            transitions = np.array(doc["transitions"], dtype=float)
            init = np.array(doc["initial_state_dist"], dtype=float)
        except (TypeError, ValueError):
            # ragged arrays or non-numeric entries, e.g. a reward distribution
            raise BadDimensions("rewards, transitions and initial_state_dist "
                                "must be rectangular arrays of numbers") from None
        return validate_mdp(cls(S, A, H, rewards, transitions, init))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def load_mdp(path):
    return MdpSpec.from_json(Path(path).read_text())


def save_mdp(spec, path):
    Path(path).write_text(spec.to_json(indent=1) + "\n")


def validate_mdp(spec):
    """Check every structural invariant of ``spec`` and return it unchanged."""
    for name in ("S", "A", "H"):
        value = getattr(spec, name)
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
            raise BadDimensions(f"{name} must be a positive integer, got {value!r}")
    S, A, H = spec.S, spec.A, spec.H
    r = np.asarray(spec.rewards)
    P = np.asarray(spec.transitions)
    mu = np.asarray(spec.initial_state_dist)
    if r.shape != (H, S, A):
        raise BadDimensions(f"rewards shape {r.shape}, expected {(H, S, A)}")
    if P.shape != (H, S, A, S):
        raise BadDimensions(f"transitions shape {P.shape}, expected {(H, S, A, S)}")
    if mu.shape != (S,):
        raise BadDimensions(f"initial_state_dist shape {mu.shape}, expected {(S,)}")

    bad = np.argwhere(~((r >= 0.0) & (r <= 1.0)))
    if bad.size:
        idx = tuple(int(i) for i in bad[0])
        raise RewardOutOfRange(idx, float(r[idx]))

    negative = np.argwhere(~(P >= 0.0))
    if negative.size:
        idx = tuple(int(i) for i in negative[0][:3])
        raise RowNotStochastic(idx, float(P[idx].sum()))
    sums = P.sum(axis=-1)
    off = np.argwhere(np.abs(sums - 1.0) > ROW_TOL)
    if off.size:
        idx = tuple(int(i) for i in off[0])
        raise RowNotStochastic(idx, float(sums[idx]))

    if np.any(mu < 0) or abs(mu.sum() - 1.0) > ROW_TOL:
        raise RowNotStochastic((), float(mu.sum()), kind="initial_state_dist")
    return spec


@dataclass(frozen=True, eq=False)
class OptimalSolution:
    """Ground truth computed by backward induction."""

    Qstar: np.ndarray  # (H, S, A)
    Vstar: np.ndarray  # (H + 1, S), last row zero
    gaps: np.ndarray  # (H, S, A)
    delta_min: float
    qvar_max: float
    d_opt: np.ndarray  # (H, S, A) bool
    policy: np.ndarray = field(repr=False)  # (H, S) smallest-index optimal action

    @property
    def d_opt_size(self):
        return int(self.d_opt.sum())

    @property
    def d_opt_complement_size(self):
        return int(self.d_opt.size - self.d_opt.sum())

    def d_opt_triples(self):
        """The optimal triples as ``(s, a, h)`` tuples (0-indexed)."""
        return {(int(s), int(a), int(h)) for h, s, a in np.argwhere(self.d_opt)}


def backward_induction(spec):
    """Optimal ``(Q, V)`` tables; no non-degeneracy requirement."""
    r = np.asarray(spec.rewards, dtype=float)
    P = np.asarray(spec.transitions, dtype=float)
    H, S, A = r.shape
    V = np.zeros((H + 1, S))
    Q = np.zeros((H, S, A))
    for h in range(H - 1, -1, -1):
        Q[h] = r[h] + P[h] @ V[h + 1]
        V[h] = Q[h].max(axis=1)
    return Q, V


def conditional_variances(spec, V):
    """``Var_{s' ~ P_h(.|s,a)} V[h + 1, s']`` for every ``(h, s, a)``."""
    P = np.asarray(spec.transitions, dtype=float)
    nxt = np.asarray(V)[1:, None, None, :]
    mean = (P * nxt).sum(axis=-1)
    second = (P * nxt * nxt).sum(axis=-1)
    return np.maximum(second - mean * mean, 0.0)


def solve_optimal(spec):
    """Exact optimal values, gaps, maximum conditional variance and D_opt.

    Raises ``DegenerateMdp`` when no gap is strictly positive.
    """
    Q, V = backward_induction(spec)
    gaps = V[:-1, :, None] - Q
    # tiny negative values can only come from rounding in the max
    gaps = np.maximum(gaps, 0.0)
    d_opt = gaps <= TIE_TOL
    positive = gaps[~d_opt]
    if positive.size == 0:
        raise DegenerateMdp("every action is optimal at every (s, h); no positive gap")
    return OptimalSolution(
        Qstar=Q,
        Vstar=V,
        gaps=gaps,
        delta_min=float(positive.min()),
        qvar_max=float(conditional_variances(spec, V).max()),
        d_opt=d_opt,
        policy=np.argmax(Q, axis=2),
    )


def evaluate_policy(spec, policy):
    """Exact value ``V^pi[h, s]`` of a deterministic policy table ``(H, S)``."""
    r = np.asarray(spec.rewards)
    P = np.asarray(spec.transitions)
    H, S, _ = r.shape
    policy = np.asarray(policy)
    if policy.shape != (H, S):
        raise BadDimensions(f"policy shape {policy.shape}, expected {(H, S)}")
    states = np.arange(S)
    V = np.zeros((H + 1, S))
    for h in range(H - 1, -1, -1):
        acts = policy[h]
        V[h] = r[h, states, acts] + P[h, states, acts] @ V[h + 1]
    return V


# --------------------------------------------------------------------------
# generators


def _initial(S, initial):
    if initial == "uniform":
        return np.full(S, 1.0 / S)
    if initial == "first":
        mu = np.zeros(S)
        mu[0] = 1.0
        return mu
    mu = np.asarray(initial, dtype=float)
    if mu.shape != (S,):
        raise BadDimensions(f"initial distribution shape {mu.shape}, expected {(S,)}")
    return mu


def _point_masses(rng, H, S, A):
    P = np.zeros((H, S, A, S))
    targets = rng.integers(0, S, size=(H, S, A))
    np.put_along_axis(P, targets[..., None], 1.0, axis=-1)
    return P


def _dirichlet(rng, H, S, A, alpha):
    return rng.dirichlet(np.full(S, alpha), size=(H, S, A))


def _unique_optimal_rewards(rng, P, gap):
    """Backward construction of rewards giving one optimal action per (s, h).

    Returns None when some (s, h) cannot be separated by ``gap`` with rewards
    in [0, 1] under the sampled kernel.
    """
    H, S, A, _ = P.shape
    r = np.empty((H, S, A))
    V = np.zeros(S)
    margin = gap * (1 + 1e-9) + 1e-12
    for h in range(H - 1, -1, -1):
        cont = P[h] @ V
        V_h = np.empty(S)
        for s in range(S):
            best = int(rng.integers(A))
            row = rng.random(A)
            for r_best in (row[best], 1.0):
                q_best = r_best + cont[s, best]
                others = np.minimum(row, q_best - margin - cont[s])
                others[best] = r_best
                if np.all(others >= 0.0):
                    break
            else:
                return None
            r[h, s] = others
            V_h[s] = q_best
        V = V_h
    return r


def generate_mdp(family, S, A, H, seed=0, min_gap=None, max_retries=10000,
                 initial="uniform", alpha=1.0):
    """Sample an MDP from one of the built-in families.

    ``random_stochastic`` draws uniform rewards and Dirichlet(``alpha``)
    kernels; ``deterministic_chain`` uses point-mass kernels; ``unique_optimal``
    builds rewards backward so every (s, h) has exactly one optimal action.
    With ``min_gap`` set, candidates are resampled until the minimum positive
    gap reaches it.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown MDP family {family!r}; expected one of {FAMILIES}")
    if min(S, A, H) < 1:
        raise BadDimensions("S, A and H must be positive")
    if family == "unique_optimal" and A < 2:
        raise BadDimensions("unique_optimal needs at least two actions")
    if min_gap is not None and min_gap <= 0:
        raise ValueError("min_gap must be positive")
    rng = np.random.default_rng(seed)
    mu = _initial(S, initial)
    for _ in range(max_retries):
        if family == "deterministic_chain":
            P = _point_masses(rng, H, S, A)
        else:
            P = _dirichlet(rng, H, S, A, alpha)
        if family == "unique_optimal":
            r = _unique_optimal_rewards(rng, P, min_gap if min_gap else 1e-6)
            if r is None:
                continue
        else:
            r = rng.random((H, S, A))
        spec = validate_mdp(MdpSpec(S, A, H, r, P, mu))
        try:
            sol = solve_optimal(spec)
        except DegenerateMdp:
            continue
        if min_gap is not None and sol.delta_min < min_gap:
            continue
        if family == "unique_optimal" and sol.d_opt_size != S * H:
            continue
        return spec
    raise GenerationFailed(
        f"{family}: no MDP satisfying the constraints after {max_retries} draws"
    )
