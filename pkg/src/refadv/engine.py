"""Seeded episode loop with exact regret and switching-cost accounting."""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field

import numpy as np
from sklearn.utils import check_random_state

from .mdp import evaluate_policy, solve_optimal

OPT_TOL = 1e-9


class _Sampler:
    """Inverse-CDF sampling tables for one MDP, as plain Python lists."""

    def __init__(self, spec):
        cdf = np.cumsum(spec.transitions, axis=-1)
        cdf[..., -1] = 1.0
        self.cdf = cdf.tolist()
        self.rewards = np.asarray(spec.rewards, dtype=float).tolist()
        init = np.cumsum(spec.initial_state_dist)
        init[-1] = 1.0
        self.init_cdf = init.tolist()
        self.H = spec.H

    def initial_state(self, u):
        return bisect.bisect_right(self.init_cdf, u)

    def next_state(self, h, s, a, u):
        return bisect.bisect_right(self.cdf[h][s][a], u)


def _sampler(spec):
    cached = getattr(spec, "_sampler_cache", None)
    if cached is None:
        cached = _Sampler(spec)
        object.__setattr__(spec, "_sampler_cache", cached)
    return cached


def run_episode(spec, agent, s1, rng, on_step=None):
    """Play one episode from ``s1`` and feed every transition to ``agent``.

    Returns the ``(s, a, r)`` trace of length ``H``. ``on_step(h, s, a)`` is
    called before the agent observes each transition.
    """
    sampler = _sampler(spec)
    u = rng.random(spec.H)
    trace = []
    s = s1
    for h in range(spec.H):
        a = agent.select_action(s, h)
        r = sampler.rewards[h][s][a]
        s_next = sampler.next_state(h, s, a, u[h])
        if on_step is not None:
            on_step(h, s, a)
        agent.observe(s, a, h, r, s_next)
        trace.append((s, a, r))
        s = s_next
    return trace


def episode_regret(solution, spec, policy, s1):
    """Exact value shortfall of ``policy`` at ``s1``."""
    return float(solution.Vstar[0, s1] - evaluate_policy(spec, policy)[0, s1])


def switching_cost(policy_a, policy_b):
    """Number of ``(h, s)`` cells where two deterministic policies disagree."""
    a, b = np.asarray(policy_a), np.asarray(policy_b)
    if a.shape != b.shape:
        raise ValueError(f"policy shapes differ: {a.shape} vs {b.shape}")
    return int(np.count_nonzero(a != b))


@dataclass
class RunRecord:
    """Per-episode diagnostics of one run.

    Row ``k`` of ``switch_local`` counts the cells where the policy of episode
    ``k`` differs from that of episode ``k - 1`` (zero for the first
    episode), so ``cumulative_switch[-1]`` is the total switching cost.
    """

    per_episode_regret: np.ndarray
    switch_local: np.ndarray
    settled_fraction: np.ndarray
    visits_opt: np.ndarray
    visits_subopt: np.ndarray
    seed: object = None
    config_hash: str = ""
    stage_updates: np.ndarray | None = None
    optimism_hits: int = 0
    optimism_total: int = 0
    sandwich_hits: int = 0
    sandwich_total: int = 0
    solution: object = field(default=None, repr=False)

    @property
    def n_episodes(self):
        return len(self.per_episode_regret)

    @property
    def cumulative_regret(self):
        return np.cumsum(self.per_episode_regret)

    @property
    def cumulative_switch(self):
        return np.cumsum(self.switch_local)

    @property
    def n_switch(self):
        return int(self.switch_local.sum())

    @property
    def optimism_fraction(self):
        return self.optimism_hits / self.optimism_total if self.optimism_total else float("nan")

    @property
    def sandwich_fraction(self):
        return self.sandwich_hits / self.sandwich_total if self.sandwich_total else float("nan")


def run_agent(spec, agent, n_episodes, random_state=None, solution=None,
              track_optimism=False, callback=None):
    """Reset ``agent`` and run it on ``spec`` for ``n_episodes`` episodes.

    ``callback(k, agent)`` runs after every episode (``k`` 0-indexed).
    """
    if n_episodes < 1:
        raise ValueError("n_episodes must be at least 1")
    if solution is None:
        solution = solve_optimal(spec)
    rng = check_random_state(random_state)
    agent.reset(spec.S, spec.A, spec.H, n_episodes)
    sampler = _sampler(spec)

    K = n_episodes
    regret = np.empty(K)
    switches = np.zeros(K, dtype=np.int64)
    settled = np.empty(K)
    visits_opt = np.empty(K, dtype=np.int64)
    visits_subopt = np.empty(K, dtype=np.int64)
    has_stages = hasattr(agent, "stage_updates_")
    updates = np.zeros(K, dtype=np.int64) if has_stages else None

    d_opt = solution.d_opt.tolist()
    Vstar0 = solution.Vstar[0]
    Qstar = solution.Qstar.tolist()
    Vstar = solution.Vstar.tolist()
    counts = {"opt": 0, "sub": 0, "q_hit": 0, "q_tot": 0, "v_hit": 0, "v_tot": 0}
    has_lcb = hasattr(agent, "Vlcb_")

    def on_step(h, s, a):
        if d_opt[h][s][a]:
            counts["opt"] += 1
        else:
            counts["sub"] += 1
        if track_optimism:
            counts["q_tot"] += 1
            if agent.q_table[h, s, a] >= Qstar[h][s][a] - OPT_TOL:
                counts["q_hit"] += 1
            if has_lcb:
                counts["v_tot"] += 1
                vs = Vstar[h][s]
                if agent.Vlcb_[h, s] <= vs + OPT_TOL and agent.V_[h, s] >= vs - OPT_TOL:
                    counts["v_hit"] += 1

    prev_policy = None
    value0 = None
    for k in range(K):
        policy = agent.greedy_policy()
        if prev_policy is None or not np.array_equal(policy, prev_policy):
            if prev_policy is not None:
                switches[k] = switching_cost(policy, prev_policy)
            value0 = evaluate_policy(spec, policy)[0]
        s1 = sampler.initial_state(rng.random())
        regret[k] = Vstar0[s1] - value0[s1]
        before = agent.stage_updates_ if has_stages else 0
        run_episode(spec, agent, s1, rng, on_step=on_step)
        if has_stages:
            updates[k] = agent.stage_updates_ - before
        settled[k] = agent.settled_fraction()
        visits_opt[k] = counts["opt"]
        visits_subopt[k] = counts["sub"]
        prev_policy = policy
        if callback is not None:
            callback(k, agent)

    return RunRecord(
        per_episode_regret=regret,
        switch_local=switches,
        settled_fraction=settled,
        visits_opt=visits_opt,
        visits_subopt=visits_subopt,
        seed=random_state if isinstance(random_state, (int, np.integer)) else None,
        stage_updates=updates,
        optimism_hits=counts["q_hit"],
        optimism_total=counts["q_tot"],
        sandwich_hits=counts["v_hit"],
        sandwich_total=counts["v_tot"],
        solution=solution,
    )


def run_experiment(config):
    """Build the MDP and agent described by ``config`` and run it."""
    from .config import build_agent, build_mdp, config_hash

    spec = build_mdp(config)
    solution = solve_optimal(spec)
    agent = build_agent(config, spec)
    record = run_agent(spec, agent, config.K, random_state=config.seed, solution=solution)
    record.seed = config.seed
    record.config_hash = config_hash(config)
    return record
