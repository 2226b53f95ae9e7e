"""CSV emitters, log-curve fitting and beta/seed sweeps."""
from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import NamedTuple

import numpy as np
from joblib import Parallel, delayed

from .bounds import BoundInputs, all_bounds
from .engine import run_experiment
from .exceptions import InvalidConfig, TooShort

TRACE_COLUMNS = (
    "episode",
    "per_episode_regret",
    "cumulative_regret",
    "switch_local",
    "cumulative_switch",
    "settled_fraction",
    "visits_subopt_cumulative",
)

SUMMARY_COLUMNS = (
    "algorithm",
    "beta",
    "seed",
    "K",
    "config_hash",
    "total_regret",
    "n_switch",
    "delta_min",
    "qvar_max",
    "d_opt_size",
    "bound_eq1_shape_only",
    "bound_eq2_shape_only",
    "bound_eq3_shape_only",
    "bound_eq4_shape_only",
    "fit_a",
    "fit_b",
    "fit_residual",
)


class LogFit(NamedTuple):
    a: float
    b: float
    residual: float


def fit_log_curve(cumulative_regret, burn_in=0.5):
    """Least-squares fit of ``R(k) = a + b * ln(k)`` past a burn-in fraction."""
    y = np.asarray(cumulative_regret, dtype=float)
    if y.ndim != 1 or len(y) < 10:
        raise TooShort(f"need at least 10 episodes to fit, got {len(y)}")
    if not 0 <= burn_in < 1:
        raise ValueError("burn_in must lie in [0, 1)")
    k = np.arange(1, len(y) + 1, dtype=float)
    start = int(burn_in * len(y))
    x, y = np.log(k[start:]), y[start:]
    design = np.column_stack([np.ones_like(x), x])
    (a, b), *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = float(np.sqrt(np.mean((design @ np.array([a, b]) - y) ** 2)))
    return LogFit(float(a), float(b), residual)


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer, np.bool_)):
        return str(int(value))
    return "" if value is None else str(value)


def trace_csv(record):
    """The per-episode trace of ``record`` as CSV text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    cum_regret = record.cumulative_regret
    cum_switch = record.cumulative_switch
    for k in range(record.n_episodes):
        writer.writerow([
            k + 1,
            _fmt(record.per_episode_regret[k]),
            _fmt(cum_regret[k]),
            _fmt(record.switch_local[k]),
            _fmt(cum_switch[k]),
            _fmt(record.settled_fraction[k]),
            _fmt(record.visits_subopt[k]),
        ])
    return buf.getvalue()


def write_trace_csv(record, path):
    Path(path).write_text(trace_csv(record))


def summary_row(config, record):
    """Summary statistics and bound overlays at the final step count."""
    sol = record.solution
    H, S, A = sol.Qstar.shape
    inputs = BoundInputs(
        S=S, A=A, H=H, T=config.K * H, beta=config.beta,
        delta_min=sol.delta_min, qvar_max=min(sol.qvar_max, H ** 2),
        d_opt_size=sol.d_opt_size, d_opt_complement_size=sol.d_opt_complement_size,
        delta=config.delta,
    )
    bounds = all_bounds(inputs)
    try:
        fit = fit_log_curve(record.cumulative_regret)
    except TooShort:
        fit = LogFit(None, None, None)
    row = {
        "algorithm": config.algorithm,
        "beta": config.beta,
        "seed": config.seed,
        "K": config.K,
        "config_hash": record.config_hash,
        "total_regret": float(record.cumulative_regret[-1]),
        "n_switch": record.n_switch,
        "delta_min": sol.delta_min,
        "qvar_max": sol.qvar_max,
        "d_opt_size": sol.d_opt_size,
        "bound_eq1_shape_only": bounds["hoeffding_eq1"],
        "bound_eq2_shape_only": bounds["ucb_advantage_eq2"],
        "bound_eq3_shape_only": bounds["qes_eq3"],
        "bound_eq4_shape_only": bounds["switching_eq4"],
        "fit_a": fit.a,
        "fit_b": fit.b,
        "fit_residual": fit.residual,
    }
    return row


def _summary_line(row):
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow([_fmt(row[c]) for c in SUMMARY_COLUMNS])
    return buf.getvalue()


def _header_line():
    return ",".join(SUMMARY_COLUMNS) + "\n"


def _single(config):
    record = run_experiment(config)
    return record, summary_row(config, record)


def run_single(config, trace_path=None):
    record, row = _single(config)
    if trace_path is not None:
        write_trace_csv(record, trace_path)
    return record, row


def trace_filename(config):
    return f"trace_{config.algorithm}_beta{config.beta!r}_seed{config.seed}.csv"


def run_sweep(base, betas, seeds, out_dir, n_jobs=1):
    """Run every ``(beta, seed)`` pair and write traces plus ``summary.csv``.

    Results are flushed in grid order as they complete, so a failing run
    leaves all earlier outputs on disk.
    """
    betas, seeds = list(betas), list(seeds)
    if not betas or not seeds:
        raise InvalidConfig("sweep needs at least one beta and one seed")
    configs = [base.replace(beta=b, seed=s) for b in betas for s in seeds]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary_path = out / "summary.csv"
    summary_path.write_text(_header_line())

    records, rows = [], []
    results = Parallel(n_jobs=n_jobs, return_as="generator")(
        delayed(_single)(cfg) for cfg in configs
    )
    for cfg, (record, row) in zip(configs, results):
        write_trace_csv(record, out / trace_filename(cfg))
        with summary_path.open("a") as fh:
            fh.write(_summary_line(row))
        records.append(record)
        rows.append(row)
    return records, rows
