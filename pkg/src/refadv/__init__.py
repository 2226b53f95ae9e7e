"""Tabular episodic Q-learning with reference-advantage variance reduction."""
from .agents import QEarlySettledAdvantage, QHoeffding, UCBAdvantage
from .bounds import BoundInputs, bound_regret, bound_switching
from .config import ExperimentConfig, load_config, parse_config
from .engine import RunRecord, episode_regret, run_agent, run_episode, run_experiment, switching_cost
from .mdp import (
    MdpSpec,
    OptimalSolution,
    evaluate_policy,
    generate_mdp,
    load_mdp,
    save_mdp,
    solve_optimal,
    validate_mdp,
)

__version__ = "0.1.0"

__all__ = [
    "BoundInputs",
    "ExperimentConfig",
    "MdpSpec",
    "OptimalSolution",
    "QEarlySettledAdvantage",
    "QHoeffding",
    "RunRecord",
    "UCBAdvantage",
    "bound_regret",
    "bound_switching",
    "episode_regret",
    "evaluate_policy",
    "generate_mdp",
    "load_config",
    "load_mdp",
    "parse_config",
    "run_agent",
    "run_episode",
    "run_experiment",
    "save_mdp",
    "solve_optimal",
    "switching_cost",
    "validate_mdp",
]
