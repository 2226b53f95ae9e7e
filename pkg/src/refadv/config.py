"""Experiment configuration: a flat JSON document of key/value pairs.

Required keys: ``mdp``, ``algorithm``, ``K``, ``beta``, ``seed``.

``mdp`` is either a path to an MDP file or a generator family name; with a
family, ``S``, ``A`` and ``H`` are required and ``mdp_seed``, ``min_gap``,
``initial`` optional.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import numbers
from dataclasses import dataclass
from pathlib import Path

from ._validation import check_beta, check_nonnegative, check_positive, check_probability, check_tie_break
from .agents import ALGORITHMS
from .exceptions import InvalidConfig, MissingField, OutOfRange
from .mdp import FAMILIES, generate_mdp, load_mdp

REQUIRED = ("mdp", "algorithm", "K", "beta", "seed")


@dataclass(frozen=True)
class ExperimentConfig:
    mdp: str
    algorithm: str
    K: int
    beta: float
    seed: int
    S: int | None = None
    A: int | None = None
    H: int | None = None
    mdp_seed: int = 0
    min_gap: float | None = None
    initial: str = "uniform"
    p: float = 0.01
    delta: float = 0.01
    c_b: float = 1.0
    c0: float = 1.0
    n0_override: int | None = None
    tie_break: str = "smallest"
    iota_inside_sqrt: bool = False
    output: str | None = None

    @property
    def is_generated(self):
        return self.mdp in FAMILIES

    def to_dict(self):
        return dataclasses.asdict(self)

    def replace(self, **changes):
        return validate_config(dataclasses.replace(self, **changes))


_FIELDS = {f.name for f in dataclasses.fields(ExperimentConfig)}


def _int_field(name, value, minimum=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise OutOfRange(name, value, "must be an integer")
    if minimum is not None and value < minimum:
        raise OutOfRange(name, value, f"must be >= {minimum}")
    return int(value)


def validate_config(cfg):
    if cfg.algorithm not in ALGORITHMS:
        raise OutOfRange("algorithm", cfg.algorithm, f"expected one of {sorted(ALGORITHMS)}")
    _int_field("K", cfg.K, 1)
    _int_field("seed", cfg.seed, 0)
    _int_field("mdp_seed", cfg.mdp_seed, 0)
    if not isinstance(cfg.beta, numbers.Real) or isinstance(cfg.beta, bool) or cfg.beta <= 0:
        raise OutOfRange("beta", cfg.beta, "must be positive")
    check_probability("p", cfg.p)
    check_probability("delta", cfg.delta)
    check_nonnegative("c_b", cfg.c_b)
    check_positive("c0", cfg.c0)
    if cfg.n0_override is not None:
        _int_field("n0_override", cfg.n0_override, 1)
    check_tie_break(cfg.tie_break)
    if not isinstance(cfg.iota_inside_sqrt, bool):
        raise OutOfRange("iota_inside_sqrt", cfg.iota_inside_sqrt, "must be a boolean")
    if cfg.is_generated:
        for name in ("S", "A", "H"):
            value = getattr(cfg, name)
            if value is None:
                raise MissingField(name)
            _int_field(name, value, 1)
        check_beta(cfg.beta, cfg.H)
        if cfg.min_gap is not None:
            check_positive("min_gap", cfg.min_gap)
    return cfg


def parse_config(document, base_dir=None):
    """Build a validated config from a JSON string or an already-parsed dict.

    A relative MDP path is resolved against ``base_dir`` when given.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"config is not valid JSON: {exc}") from None
    if not isinstance(document, dict):
        raise InvalidConfig("config must be a JSON object")
    for name in REQUIRED:
        if name not in document:
            raise MissingField(name)
    unknown = set(document) - _FIELDS
    if unknown:
        raise InvalidConfig(f"unknown config fields: {sorted(unknown)}")
    doc = dict(document)
    if not isinstance(doc["mdp"], str):
        raise OutOfRange("mdp", doc["mdp"], "must be a file path or a family name")
    if doc["mdp"] not in FAMILIES and base_dir is not None:
        path = Path(doc["mdp"])
        if not path.is_absolute():
            doc["mdp"] = str(Path(base_dir) / path)
    return validate_config(ExperimentConfig(**doc))


def load_config(path):
    path = Path(path)
    return parse_config(path.read_text(), base_dir=path.parent)


def config_hash(cfg):
    payload = json.dumps(cfg.to_dict(), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def build_mdp(cfg):
    if cfg.is_generated:
        return generate_mdp(cfg.mdp, cfg.S, cfg.A, cfg.H, seed=cfg.mdp_seed,
                            min_gap=cfg.min_gap, initial=cfg.initial)
    try:
        return load_mdp(cfg.mdp)
    except FileNotFoundError:
        raise InvalidConfig(f"MDP file not found: {cfg.mdp}") from None


def build_agent(cfg, spec):
    """Instantiate the configured agent; ``beta`` is checked against ``spec.H``."""
    check_beta(cfg.beta, spec.H)
    if cfg.algorithm == "ucb_advantage":
        return ALGORITHMS[cfg.algorithm](
            beta=cfg.beta, p=cfg.p, c0=cfg.c0, n0_override=cfg.n0_override,
            iota_inside_sqrt=cfg.iota_inside_sqrt, tie_break=cfg.tie_break,
        )
    if cfg.algorithm == "q_early_settled":
        return ALGORITHMS[cfg.algorithm](
            beta=cfg.beta, delta=cfg.delta, c_b=cfg.c_b, tie_break=cfg.tie_break,
        )
    return ALGORITHMS[cfg.algorithm](delta=cfg.delta, c_b=cfg.c_b, tie_break=cfg.tie_break)
