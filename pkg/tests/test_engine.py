import numpy as np
import pytest

from refadv import parse_config
from refadv.agents import QEarlySettledAdvantage, QHoeffding, UCBAdvantage
from refadv.engine import episode_regret, run_agent, run_episode, run_experiment, switching_cost
from refadv.exceptions import InvalidConfig
from refadv.mdp import generate_mdp, solve_optimal

from conftest import make_m2


def test_m2_fresh_agent_trace(m2):
    agent = UCBAdvantage().reset(2, 2, 2, 10)
    trace = run_episode(m2, agent, 0, np.random.default_rng(0))
    assert [a for _, a, _ in trace] == [0, 0]
    assert [r for _, _, r in trace] == [1.0, 1.0]


def test_horizon_one_trace():
    spec = generate_mdp("random_stochastic", 2, 2, 1, seed=0)
    agent = QHoeffding().reset(2, 2, 1, 3)
    assert len(run_episode(spec, agent, 1, np.random.default_rng(0))) == 1


def test_same_seed_same_trace():
    spec = generate_mdp("random_stochastic", 3, 2, 3, seed=0)
    traces = []
    for _ in range(2):
        agent = QEarlySettledAdvantage().reset(3, 2, 3, 20)
        rng = np.random.default_rng(9)
        traces.append([run_episode(spec, agent, 0, rng) for _ in range(20)])
    assert traces[0] == traces[1]


class TestRegret:
    def test_optimal_policy(self, m2):
        sol = solve_optimal(m2)
        assert episode_regret(sol, m2, sol.policy, 0) == 0.0

    def test_m2_suboptimal(self, m2):
        sol = solve_optimal(m2)
        policy = sol.policy.copy()
        policy[0, 0] = 1
        assert episode_regret(sol, m2, policy, 0) == 1.5

    def test_nonnegative(self):
        spec = generate_mdp("random_stochastic", 3, 2, 3, seed=4)
        sol = solve_optimal(spec)
        rng = np.random.default_rng(0)
        for _ in range(50):
            policy = rng.integers(0, 2, size=(3, 3))
            assert episode_regret(sol, spec, policy, int(rng.integers(3))) >= -1e-12


class TestSwitchingCost:
    def test_identical(self):
        p = np.zeros((3, 2), dtype=int)
        assert switching_cost(p, p) == 0

    def test_one_cell(self):
        p = np.zeros((3, 2), dtype=int)
        q = p.copy()
        q[2, 1] = 1
        assert switching_cost(p, q) == 1

    def test_three_of_six(self):
        p = np.array([[0, 1], [1, 0], [0, 0]])
        q = np.array([[1, 1], [0, 0], [0, 1]])
        assert switching_cost(p, q) == 3

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            switching_cost(np.zeros((2, 2)), np.zeros((3, 2)))


class TestRunRecord:
    @pytest.fixture(scope="class")
    @classmethod
    def record(cls):
        spec = generate_mdp("random_stochastic", 3, 2, 3, seed=3)
        return run_agent(spec, UCBAdvantage(n0_override=100), 800, random_state=2)

    def test_lengths(self, record):
        assert record.n_episodes == 800
        for arr in (record.per_episode_regret, record.switch_local, record.settled_fraction,
                    record.visits_opt, record.visits_subopt, record.stage_updates):
            assert len(arr) == 800

    def test_regret_nonnegative_and_cumulative_monotone(self, record):
        assert np.all(record.per_episode_regret >= -1e-9)
        assert np.all(np.diff(record.cumulative_regret) >= -1e-9)
        assert np.all(np.diff(record.cumulative_switch) >= 0)
        assert np.all(np.diff(record.visits_subopt) >= 0)

    def test_visit_totals(self, record):
        k = np.arange(1, 801)
        np.testing.assert_array_equal(record.visits_opt + record.visits_subopt, 3 * k)

    def test_first_episode_has_no_switch(self, record):
        assert record.switch_local[0] == 0

    def test_lazy_switching(self, record):
        changed = np.nonzero(record.switch_local[1:])[0] + 1
        assert np.all(record.stage_updates[changed - 1] > 0)

    def test_settled_fraction_in_unit_interval(self, record):
        assert np.all((record.settled_fraction >= 0) & (record.settled_fraction <= 1))
        assert np.all(np.diff(record.settled_fraction) >= 0)

    def test_regret_matches_policy_evaluation(self):
        spec = generate_mdp("random_stochastic", 2, 2, 2, seed=1, initial="first")
        sol = solve_optimal(spec)
        seen = []

        class Spy(UCBAdvantage):
            def select_action(self, s, h):
                if h == 0:
                    seen.append(self.greedy_policy())
                return super().select_action(s, h)

        rec = run_agent(spec, Spy(), 60, random_state=0, solution=sol)
        expected = [episode_regret(sol, spec, p, 0) for p in seen]
        np.testing.assert_allclose(rec.per_episode_regret, expected, atol=1e-12)


def test_k_equals_one():
    spec = generate_mdp("random_stochastic", 2, 2, 2, seed=0)
    rec = run_agent(spec, QEarlySettledAdvantage(), 1, random_state=0)
    assert rec.n_episodes == 1 and rec.n_switch == 0
    assert list(rec.cumulative_switch) == [0]


def _cfg(**kw):
    doc = {"mdp": "deterministic_chain", "S": 3, "A": 2, "H": 3, "mdp_seed": 7,
           "algorithm": "ucb_advantage", "K": 2000, "beta": 1.0, "seed": 0}
    doc.update(kw)
    return parse_config(doc)


def test_run_experiment_deterministic_chain_locks_on():
    # a loose failure probability keeps the bonus below the 0.3 gap within K=2000
    rec = run_experiment(_cfg(min_gap=0.3, initial="first", p=0.9))
    assert rec.config_hash and rec.seed == 0
    assert rec.solution.qvar_max == 0.0
    tail = rec.per_episode_regret[-300:]
    assert np.all(np.abs(tail) <= 1e-12)


def test_deterministic_chain_regret_rate_falls_at_default_constants():
    rec = run_experiment(_cfg(min_gap=0.3, K=20000))
    r = rec.per_episode_regret
    assert r[-5000:].mean() < 0.5 * r[:5000].mean()


def test_run_experiment_repeatable():
    a = run_experiment(_cfg(algorithm="q_early_settled", K=300))
    b = run_experiment(_cfg(algorithm="q_early_settled", K=300))
    assert a.per_episode_regret.tobytes() == b.per_episode_regret.tobytes()
    assert a.switch_local.tobytes() == b.switch_local.tobytes()


def test_beta_outside_horizon_rejected(tmp_path):
    with pytest.raises(InvalidConfig):
        _cfg(beta=3.5)
    path = tmp_path / "m2.json"
    path.write_text(make_m2().to_json())
    cfg = parse_config({"mdp": str(path), "algorithm": "q_early_settled", "K": 5,
                        "beta": 2.5, "seed": 0})
    with pytest.raises(InvalidConfig):
        run_experiment(cfg)


def test_visit_share_declines_on_gap_separated_mdp():
    spec = generate_mdp("unique_optimal", 3, 2, 3, seed=0, min_gap=0.3)
    rec = run_agent(spec, UCBAdvantage(beta=3.0), 8000, random_state=0)
    k = np.arange(1, 8001)
    share = rec.visits_subopt / k
    checkpoints = share[[1999, 3999, 5999, 7999]]
    assert np.all(np.diff(checkpoints) < 0)
