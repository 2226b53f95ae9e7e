"""Small argument checks reused by agents and configs."""
import numbers

from .exceptions import OutOfRange


def check_beta(beta, H):
    if not isinstance(beta, numbers.Real) or not 0 < beta <= H:
        raise OutOfRange("beta", beta, f"must lie in (0, H] with H={H}")
    return float(beta)


def check_probability(name, value):
    if not isinstance(value, numbers.Real) or not 0 < value < 1:
        raise OutOfRange(name, value, "must lie in (0, 1)")
    return float(value)


def check_positive(name, value):
    if not isinstance(value, numbers.Real) or not value > 0:
        raise OutOfRange(name, value, "must be positive")
    return value


def check_tie_break(rule):
    if rule not in ("smallest", "largest"):
        raise OutOfRange("tie_break", rule, "expected 'smallest' or 'largest'")
    return rule


def check_nonnegative(name, value):
    if not isinstance(value, numbers.Real) or not value >= 0:
        raise OutOfRange(name, value, "must be non-negative")
    return value
