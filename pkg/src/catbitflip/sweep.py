"""Sweep rows over alpha^2, leakage probes and CSV/JSON writers.

Rows are computed in a process pool sized by ``CATBITFLIP_WORKERS`` (default:
logical cores) and written once, in grid order.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
import csv
import io
import json
import math
import os
import sys

import numpy as np

from .errors import AmbiguousSelection, ConfigError, NumericalError, SignalTooSmall
from .fock import FockSpace, default_dim
from .liouville import cat_basis, trace_parallel
from .rates import rate_for_spec, second_order_eigensum
from .spectral import RELIABLE_FLOOR, evolve, fit_bitflip_decay, spectral_rate, total_generator

WORKERS_ENV = "CATBITFLIP_WORKERS"
COLUMNS = (
    "alpha2",
    "gamma_analytic_first",
    "gamma_analytic_second",
    "gamma_analytic_total",
    "gamma_spectral",
    "overlap_score",
    "dim_used",
    "reliability_flag",
)
FLAGS = ("ok", "truncation", "floor", "ambiguous")
EIGENSUM_TOL = 1e-6  # eigensum vs closed form, relative
DECAY_TOL = 0.05  # decay fit vs eigenvalue, relative
DECAY_MIN_RATE = 1e-9  # below this the fit horizon is too long for expm to stay accurate
EIGENSUM_TARGET = {"photon_loss": "z", "zgate": "z", "detuning": "+-"}


@dataclass
class SweepRow:
    alpha2: float
    gamma_analytic_first: float = None
    gamma_analytic_second: float = None
    gamma_analytic_total: float = None
    gamma_spectral: float = None
    overlap_score: float = None
    dim_used: int = None
    reliability_flag: str = "ok"


def flag_for(exc):
    if isinstance(exc, AmbiguousSelection):
        return "ambiguous"
    if isinstance(exc, SignalTooSmall):
        return "floor"
    return "truncation"


def _eigensum_gamma(spec, alpha):
    res = second_order_eigensum(spec, alpha, target=EIGENSUM_TARGET[spec.kind])
    return -res.lambda_second.real / 2.0


def compute_row(config, alpha2, strict=False):
    """One :class:`SweepRow`; with ``strict`` numerical errors propagate instead of being flagged."""
    alpha = math.sqrt(alpha2)
    spec = config.spec()
    methods = set(config.methods)
    row = SweepRow(alpha2)
    flags = []

    def record(exc):
        if strict:
            raise exc
        flags.append(flag_for(exc))

    if spec is not None and methods & {"analytic", "eigensum"}:
        try:
            res = rate_for_spec(alpha, spec)
            first, second = max(res.gamma_first, 0.0) + 0.0, res.gamma_second
            if "eigensum" in methods and spec.kind in EIGENSUM_TARGET:
                numeric = _eigensum_gamma(spec, alpha)
                if "analytic" not in methods:
                    second = numeric
                elif abs(numeric - second) > EIGENSUM_TOL * abs(second):
                    flags.append("truncation")
            row.gamma_analytic_first = first
            row.gamma_analytic_second = second
            row.gamma_analytic_total = first + second
        except NumericalError as exc:
            record(exc)
    elif spec is None and "analytic" in methods:
        row.gamma_analytic_first = row.gamma_analytic_second = row.gamma_analytic_total = 0.0

    gamma_eig = None
    if "spectral" in methods:
        try:
            sr = spectral_rate(alpha, spec, dim=config.dim_override)
            gamma_eig = sr.gamma
            row.overlap_score = sr.overlap_score
            row.dim_used = sr.dim_used
            if not sr.converged:
                flags.append("truncation")
            if gamma_eig < RELIABLE_FLOOR:
                flags.append("floor")
            row.gamma_spectral = max(gamma_eig, 0.0)
        except NumericalError as exc:
            record(exc)

    if "decay_fit" in methods:
        estimate = gamma_eig if gamma_eig is not None else row.gamma_analytic_total
        try:
            fitted = _decay_fit(config, alpha, spec, estimate, row.dim_used)
        except NumericalError as exc:
            record(exc)
            fitted = None
        if fitted is not None:
            if row.gamma_spectral is None:
                row.gamma_spectral = max(fitted, 0.0)
                row.dim_used = row.dim_used or config.dim_override or default_dim(alpha2)
            elif gamma_eig is not None and gamma_eig >= RELIABLE_FLOOR:
                if abs(fitted - gamma_eig) > DECAY_TOL * gamma_eig:
                    flags.append("ambiguous")

    for f in ("truncation", "ambiguous", "floor"):
        if f in flags:
            row.reliability_flag = f
            break
    return row


def _decay_fit(config, alpha, spec, estimate, dim):
    """Decay-fit cross-check; skipped (None) when the expected rate is too small to fit."""
    if estimate is None or estimate < DECAY_MIN_RATE:
        return None
    space = FockSpace(dim or config.dim_override or default_dim(alpha * alpha))
    horizon = 5.0 + 1.0 / (2.0 * estimate)
    return fit_bitflip_decay(total_generator(space, alpha, spec), cat_basis(space, alpha), horizon)


def run_rate(config):
    """Single-point rate; the config grid must hold exactly one alpha^2."""
    if len(config.alpha2_grid) != 1:
        raise ConfigError(f"rate needs exactly one alpha^2, got {len(config.alpha2_grid)}")
    return compute_row(config, config.alpha2_grid[0], strict=True)


def worker_count():
    raw = os.environ.get(WORKERS_ENV)
    if raw is None or raw == "":
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
    if n < 1:
        raise ConfigError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
    return n


def _row_task(args):
    config, alpha2 = args
    return compute_row(config, alpha2)


def sweep_rows(config, workers=None):
    workers = workers or worker_count()
    tasks = [(config, a2) for a2 in config.alpha2_grid]
    if workers == 1 or len(tasks) == 1:
        return [_row_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(_row_task, tasks))


def run_sweep(config, workers=None):
    rows = sweep_rows(config, workers)
    write_rows(rows, config.output_path, config.format)
    return rows


# ---------------------------------------------------------------- serialization


def fmt(x):
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.17g}"


def rows_to_csv(rows, columns=COLUMNS):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        d = asdict(r) if not isinstance(r, dict) else r
        w.writerow([fmt(d[c]) for c in columns])
    return buf.getvalue()


def rows_to_json(rows):
    out = []
    for r in rows:
        d = asdict(r) if not isinstance(r, dict) else dict(r)
        # 17 significant digits round-trips doubles exactly, so json's repr is enough
        out.append({k: (float(v) if isinstance(v, (float, np.floating)) else v) for k, v in d.items()})
    return json.dumps(out, indent=2) + "\n"


def write_rows(rows, path, fmt_name="csv", columns=COLUMNS):
    text = rows_to_csv(rows, columns) if fmt_name == "csv" else rows_to_json(rows)
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)
    return text


# ---------------------------------------------------------------- leakage probe


def leakage_trajectory(spec, alpha2, t_grid, dim=None):
    """Leakage ``l(t)`` of ``|0c><0c|`` under ``L0 + L1`` (``spec=None`` for L0 alone)."""
    alpha = math.sqrt(alpha2)
    space = FockSpace(dim or default_dim(alpha2) + 10)
    basis = cat_basis(space, alpha)
    rho0 = np.outer(basis.zero, basis.zero.conj())
    traj = evolve(total_generator(space, alpha, spec), rho0, t_grid)
    return np.array([1.0 - trace_parallel(r, basis).real for r in traj])


def early_time_fit(t, l):
    """Least-squares ``l = b t + c t^2`` through the origin; returns ``(b, 2c)`` = (rate, curvature)."""
    t = np.asarray(t, dtype=float)
    design = np.column_stack([t, t * t])
    (b, c), *_ = np.linalg.lstsq(design, np.asarray(l, dtype=float), rcond=None)
    return float(b), float(2.0 * c)


@dataclass
class LeakageRow:
    t: float
    leakage: float


def run_leakage(config):
    if len(config.alpha2_grid) != 1:
        raise ConfigError("leakage needs exactly one alpha^2")
    t_grid = config.t_grid if config.t_grid is not None else list(np.linspace(0.0, 2.0, 21))
    l = leakage_trajectory(config.spec(), config.alpha2_grid[0], t_grid, config.dim_override)
    rows = [LeakageRow(float(t), float(v)) for t, v in zip(t_grid, l)]
    write_rows(rows, config.output_path, config.format, columns=("t", "leakage"))
    return rows

