from ._base import TabularAgent, greedy
from .early_settled import QEarlySettledAdvantage, learning_rate
from .hoeffding import QHoeffding
from .ucb_advantage import UCBAdvantage, compute_bonuses, count_stage_ends, stage_lengths

ALGORITHMS = {
    "ucb_advantage": UCBAdvantage,
    "q_early_settled": QEarlySettledAdvantage,
    "hoeffding": QHoeffding,
}

__all__ = [
    "ALGORITHMS",
    "QEarlySettledAdvantage",
    "QHoeffding",
    "TabularAgent",
    "UCBAdvantage",
    "compute_bonuses",
    "count_stage_ends",
    "greedy",
    "learning_rate",
    "stage_lengths",
]
