import itertools

import numpy as np
import pytest

from refadv.mdp import MdpSpec, evaluate_policy, validate_mdp


def make_m2():
    """S=2, A=2, H=2; action a moves to state a; only (s0, a0) pays 1, (s0, a1) pays 0.5."""
    S, A, H = 2, 2, 2
    r = np.zeros((H, S, A))
    r[:, 0, 0] = 1.0
    r[:, 0, 1] = 0.5
    P = np.zeros((H, S, A, S))
    P[:, :, 0, 0] = 1.0
    P[:, :, 1, 1] = 1.0
    return validate_mdp(MdpSpec(S, A, H, r, P, np.array([1.0, 0.0])))


def random_spec(rng, S, A, H):
    r = rng.random((H, S, A))
    P = rng.dirichlet(np.ones(S), size=(H, S, A))
    return validate_mdp(MdpSpec(S, A, H, r, P, np.full(S, 1.0 / S)))


def brute_force_best(spec):
    """Independent oracle: best V(1, s) over every deterministic policy."""
    best = np.full(spec.S, -np.inf)
    for flat in itertools.product(range(spec.A), repeat=spec.S * spec.H):
        policy = np.array(flat).reshape(spec.H, spec.S)
        best = np.maximum(best, evaluate_policy(spec, policy)[0])
    return best


def path_value(spec, policy, s):
    """Expected return by explicit enumeration of every state path."""
    total = 0.0
    for path in itertools.product(range(spec.S), repeat=spec.H - 1):
        states = (s,) + path
        prob, ret = 1.0, 0.0
        for h, st in enumerate(states):
            a = policy[h][st]
            ret += spec.rewards[h, st, a]
            if h + 1 < spec.H:
                prob *= spec.transitions[h, st, a, states[h + 1]]
        total += prob * ret
    return total


@pytest.fixture
def m2():
    return make_m2()


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
