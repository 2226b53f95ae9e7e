"""Shape-only evaluators for the regret and switching-cost bounds.

Hidden constants are set to 1 and logarithms are natural. A logarithm whose
argument is at most 1 contributes 0, since the bound is vacuous there.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

REGRET_BOUNDS = ("hoeffding_eq1", "ucb_advantage_eq2", "qes_eq3")


def _log(x):
    return math.log(x) if x > 1.0 else 0.0


@dataclass(frozen=True)
class BoundInputs:
    S: int
    A: int
    H: int
    T: float
    beta: float
    delta_min: float
    qvar_max: float
    d_opt_size: int
    d_opt_complement_size: int
    delta: float = 0.01

    def __post_init__(self):
        if min(self.S, self.A, self.H) < 1 or self.T <= 0:
            raise ValueError("S, A, H and T must be positive")
        if not 0 < self.beta <= self.H:
            raise ValueError(f"beta must lie in (0, H], got {self.beta}")
        if not 0 <= self.qvar_max <= self.H ** 2:
            raise ValueError("qvar_max must lie in [0, H^2]")
        if self.d_opt_size + self.d_opt_complement_size != self.S * self.A * self.H:
            raise ValueError("|D_opt| + |D_opt^c| must equal S*A*H")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")

    @classmethod
    def from_solution(cls, spec, solution, T, beta, delta=0.01):
        return cls(
            S=spec.S, A=spec.A, H=spec.H, T=T, beta=beta,
            delta_min=solution.delta_min, qvar_max=solution.qvar_max,
            d_opt_size=solution.d_opt_size,
            d_opt_complement_size=solution.d_opt_complement_size,
            delta=delta,
        )


def regret_bound_terms(inputs, which):
    """``(gap_dependent, gap_free)`` parts of one regret bound."""
    if which not in REGRET_BOUNDS:
        raise ValueError(f"unknown bound {which!r}; expected one of {REGRET_BOUNDS}")
    if inputs.delta_min <= 0:
        raise ValueError("delta_min must be positive")
    S, A, H, T, beta = inputs.S, inputs.A, inputs.H, inputs.T, inputs.beta
    log_sat = _log(S * A * T)
    if which == "hoeffding_eq1":
        return H ** 6 * S * A * log_sat / inputs.delta_min, 0.0
    gap_term = (inputs.qvar_max + beta ** 2 * H) * H ** 3 * S * A * log_sat / inputs.delta_min
    if which == "ucb_advantage_eq2":
        free = H ** 8 * S ** 2 * A * log_sat * _log(T) / beta ** 2
    else:
        free = H ** 7 * S * A * log_sat ** 2 / beta
    return gap_term, free


def bound_regret(inputs, which):
    gap_term, free = regret_bound_terms(inputs, which)
    return gap_term + free


def bound_switching(inputs):
    """Gap-dependent switching-cost bound for UCB-Advantage (``0/0 = 0``)."""
    H, T = inputs.H, inputs.T
    n_opt, n_sub = inputs.d_opt_size, inputs.d_opt_complement_size
    first = H * n_opt * math.log(T / (H * n_opt) + 1) if n_opt else 0.0
    if n_sub == 0:
        return first
    if inputs.delta_min <= 0:
        raise ValueError("delta_min must be positive")
    arg = (H ** 4 * inputs.S * math.sqrt(inputs.A)
           * _log(inputs.S * inputs.A * T / inputs.delta)
           / (inputs.beta * math.sqrt(n_sub) * inputs.delta_min))
    return first + H * n_sub * _log(arg)


def all_bounds(inputs):
    out = {name: bound_regret(inputs, name) for name in REGRET_BOUNDS}
    out["switching_eq4"] = bound_switching(inputs)
    return out
