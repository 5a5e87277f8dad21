"""Seeded Monte Carlo verification of the closed-form limits.

Trial i always consumes random substream i of the run seed, so estimates
are reproducible bit-for-bit and invariant to how trials are distributed
across workers; the reduction uses compensated summation in trial order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import asymptotic, circular as _circ, correlation
from .channel import draw_realization, spectral_efficiency, target_matrix
from .errors import NumericError, ValidationError
from .params import Centralized, Circular, DistributedExplicit, SystemParams, Topology, validate
from .stochastic import RandomStream, sample_cscg, sample_shadowing


@dataclass(frozen=True)
class SEEstimate:
    """Monte Carlo spectral-efficiency estimate."""

    mean: float
    std_error: float
    trials: int
    seed: int


@dataclass(frozen=True)
class TargetMatrixStats:
    """Concentration diagnostics of the reduced target matrix."""

    median_rho_off: float          # median of max off-diag magnitude / min diag
    rho_off: np.ndarray            # per-realization ratios
    mean_diag: np.ndarray          # realization-averaged diagonal
    predicted_diag: np.ndarray     # delta * lambda_T * omega
    trials: int
    seed: int


@dataclass
class SweepTable:
    """Grid of closed forms paired with Monte Carlo estimates."""

    axis: str
    columns: list[str]
    rows: list[dict]
    meta: dict = field(default_factory=dict)


def _scheme_spectra(params: SystemParams, topo: Topology):
    lam_t = correlation.exp_corr_spectrum(params.theta_t, params.n_t)
    if isinstance(topo, Centralized):
        lam_r = correlation.exp_corr_spectrum(params.theta_r, params.n_r)
    else:
        lam_r = np.ones(params.n_r)
    return lam_t, lam_r


def _trial_se(params: SystemParams, topo: Topology, coupling: np.ndarray,
              seed: int, index: int) -> float:
    stream = RandomStream(seed, index)
    real = draw_realization(params, topo, coupling, stream)
    try:
        return spectral_efficiency(target_matrix(real), params.snr, params.n_t)
    except NumericError as exc:
        raise NumericError(f"trial {index}: {exc}") from exc


def _trial_batch(args) -> list[tuple[int, float]]:
    params, topo, coupling, seed, indices = args
    return [(i, _trial_se(params, topo, coupling, seed, i)) for i in indices]


def run_trials(params: SystemParams, topo: Topology, trials: int, seed: int,
               workers: int = 1) -> SEEstimate:
    """Estimate mean spectral efficiency over seeded channel realizations.

    The estimate is identical for any worker count: per-trial values are
    keyed by trial index and reduced in a fixed order.
    """
    validate(params, topo)
    if trials < 1:
        raise ValidationError(f"need at least one trial, got {trials}")
    if workers < 1:
        raise ValidationError(f"workers must be positive, got {workers}")
    lam_t, lam_r = _scheme_spectra(params, topo)
    coupling = correlation.coupling_matrix(lam_r, lam_t)

    values = np.empty(trials, dtype=float)
    if workers == 1 or trials == 1:
        for i in range(trials):
            values[i] = _trial_se(params, topo, coupling, seed, i)
    else:
        chunks = np.array_split(np.arange(trials), min(4 * workers, trials))
        jobs = [
            (params, topo, coupling, seed, [int(i) for i in chunk])
            for chunk in chunks
            if chunk.size
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for batch in pool.map(_trial_batch, jobs):
                for i, se in batch:
                    values[i] = se

    mean = math.fsum(values) / trials
    if trials > 1:
        var = math.fsum((v - mean) ** 2 for v in values) / (trials - 1)
        std_error = math.sqrt(var / trials)
    else:
        std_error = 0.0
    return SEEstimate(mean=mean, std_error=std_error, trials=trials, seed=seed)


def _fixed_distances(params: SystemParams, topo: Topology) -> np.ndarray:
    if isinstance(topo, Centralized):
        return np.full(params.n_r, topo.d)
    if isinstance(topo, DistributedExplicit):
        return np.asarray(topo.distances, dtype=float)
    if isinstance(topo, Circular):
        if topo.user == "random":
            raise ValidationError("statistics need a fixed user position")
        geom = _circ.RingGeometry(topo.r_c, topo.r_a, topo.user[0], topo.user[1])
        return _circ.user_antenna_distances(geom, params.n_r)
    raise ValidationError(f"unknown topology {type(topo).__name__}")


def estimate_target_matrix(params: SystemParams, topo: Topology, trials: int,
                           seed: int) -> TargetMatrixStats:
    """Measure how fast the target matrix concentrates on its diagonal limit.

    rho_off compares the worst off-diagonal magnitude to the smallest
    diagonal entry; its median shrinks like n_r^(-1/2). The averaged
    diagonal is reported next to its predicted limit delta*lambda_T*omega.
    """
    validate(params, topo)
    if params.n_t < 2:
        raise ValidationError("off-diagonal statistics need n_t >= 2")
    if trials < 1:
        raise ValidationError(f"need at least one trial, got {trials}")
    lam_t, lam_r = _scheme_spectra(params, topo)
    coupling = correlation.coupling_matrix(lam_r, lam_t)
    distances = _fixed_distances(params, topo)

    ratios = np.empty(trials, dtype=float)
    diags = np.empty((trials, params.n_t), dtype=float)
    off_mask = ~np.eye(params.n_t, dtype=bool)
    for i in range(trials):
        stream = RandomStream(seed, i)
        m = target_matrix(draw_realization(params, topo, coupling, stream))
        diag = np.real(np.diag(m))
        ratios[i] = np.max(np.abs(m[off_mask])) / np.min(diag)
        diags[i] = diag

    mean_diag = np.array([math.fsum(diags[:, j]) / trials for j in range(params.n_t)])
    predicted = asymptotic.asymptotic_diag(lam_t, distances, params.nu, params.omega)
    return TargetMatrixStats(
        median_rho_off=float(np.median(ratios)),
        rho_off=ratios,
        mean_diag=mean_diag,
        predicted_diag=predicted,
        trials=trials,
        seed=seed,
    )


def lln_weighted_check(weights, dist: str, n: int, seed: int,
                       alpha: float = 1.0, omega: float = 1.0) -> tuple[float, float]:
    """Empirical check of the weighted law of large numbers behind the limits.

    Builds p_k = sqrt(a_k) * g_k with the requested entry law ("cscg" for
    unit CSCG entries, "gamma_cscg" for shadowed entries phi^(1/2)*h) and
    returns (|p.p/n - sum(a_k) mu / n|, |p.q/n|) for an independent q of the
    same construction. Both shrink like n^(-1/2).
    """
    a = np.asarray(weights, dtype=float)
    if a.ndim != 1 or a.size != n:
        raise ValidationError(f"weights must be a length-{n} vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)) or np.any(a < 0.0):
        raise ValidationError("weights must be finite and nonnegative (bounded energy)")
    stream = RandomStream(seed, 0)

    def draw_entries() -> np.ndarray:
        g = sample_cscg(stream, n, 1)[:, 0]
        if dist == "cscg":
            return g
        if dist == "gamma_cscg":
            phi = sample_shadowing(stream, alpha, omega, size=n)
            return np.sqrt(phi) * g
        raise ValidationError(f'unknown distribution spec {dist!r}; use "cscg" or "gamma_cscg"')

    mu = 1.0 if dist == "cscg" else omega
    root_a = np.sqrt(a)
    p = root_a * draw_entries()
    q = root_a * draw_entries()
    self_err = abs(float(np.vdot(p, p).real) / n - float(np.sum(a)) * mu / n)
    cross = abs(complex(np.vdot(p, q))) / n
    return self_err, cross


_AXES = ("snr_db", "d", "r_a", "spacing", "n_r")


def _with_axis_value(params: SystemParams, topo: Topology, axis: str, value: float,
                     spacing_side: str, cmimo_d: Optional[float]):
    """Return (params, topo, cmimo_d) with one axis moved to `value`."""
    if axis == "snr_db":
        return replace(params, snr=10.0 ** (value / 10.0)), topo, cmimo_d
    if axis == "d":
        if isinstance(topo, Centralized):
            return params, Centralized(d=float(value)), cmimo_d
        if isinstance(topo, DistributedExplicit) and cmimo_d is not None:
            return params, topo, float(value)
        raise ValidationError(
            "axis 'd' needs a co-located topology or a distributed one with cmimo_d"
        )
    if axis == "r_a":
        if not isinstance(topo, Circular):
            raise ValidationError("axis 'r_a' needs a circular topology")
        return params, Circular(topo.r_c, float(value), topo.user), cmimo_d
    if axis == "spacing":
        theta = math.exp(-float(value))
        if spacing_side == "t":
            return replace(params, theta_t=theta), topo, cmimo_d
        if spacing_side == "r":
            return replace(params, theta_r=theta), topo, cmimo_d
        raise ValidationError(f'spacing_side must be "t" or "r", got {spacing_side!r}')
    if axis == "n_r":
        if isinstance(topo, DistributedExplicit):
            raise ValidationError("axis 'n_r' cannot resize an explicit distance list")
        return replace(params, n_r=int(value)), topo, cmimo_d
    raise ValidationError(f"unknown sweep axis {axis!r}; expected one of {_AXES}")


def _sweep_columns(topo: Topology, trials: int, cmimo_d: Optional[float],
                   scalar_alpha: bool, nu_is_4: bool) -> list[str]:
    cols: list[str] = []
    if isinstance(topo, Centralized):
        cols += ["se_cmimo_asym", "se_cmimo_high_snr"]
        if trials > 0:
            cols += ["mc_cmimo_mean", "mc_cmimo_stderr"]
    elif isinstance(topo, DistributedExplicit):
        cols += ["delta", "se_dmimo_asym", "se_dmimo_high_snr"]
        if cmimo_d is not None:
            cols += ["d_cmimo", "se_cmimo_asym", "ordering", "d_crossover"]
        if trials > 0:
            cols += ["mc_dmimo_mean", "mc_dmimo_stderr"]
            if cmimo_d is not None and scalar_alpha:
                cols += ["mc_cmimo_mean", "mc_cmimo_stderr"]
    elif isinstance(topo, Circular):
        if topo.user == "random":
            if nu_is_4:
                cols += ["avg_se_dmimo", "avg_se_cmimo_center"]
        else:
            cols += ["se_cmimo_ring", "se_dmimo_ring"]
        if trials > 0:
            cols += ["mc_dmimo_mean", "mc_dmimo_stderr"]
            if topo.user != "random" and scalar_alpha:
                cols += ["mc_cmimo_mean", "mc_cmimo_stderr"]
    return cols


def _sweep_row(params: SystemParams, topo: Topology, trials: int, seed: int,
               workers: int, cmimo_d: Optional[float], scalar_alpha: bool,
               nu_is_4: bool) -> dict:
    row: dict = {}
    if isinstance(topo, Centralized):
        row["se_cmimo_asym"] = asymptotic.se_cmimo_asymptotic(params, topo.d)
        row["se_cmimo_high_snr"] = asymptotic.se_high_snr(params, topo)
        if trials > 0:
            est = run_trials(params, topo, trials, seed, workers)
            row["mc_cmimo_mean"], row["mc_cmimo_stderr"] = est.mean, est.std_error
    elif isinstance(topo, DistributedExplicit):
        delta = asymptotic.delta_sum(topo.distances, params.nu)
        row["delta"] = delta
        row["se_dmimo_asym"] = asymptotic.se_dmimo_asymptotic(params, topo.distances)
        row["se_dmimo_high_snr"] = asymptotic.se_high_snr(params, topo)
        if cmimo_d is not None:
            row["d_cmimo"] = cmimo_d
            row["se_cmimo_asym"] = asymptotic.se_cmimo_asymptotic(params, cmimo_d)
            row["ordering"] = asymptotic.compare_schemes(params.n_r, cmimo_d, params.nu, delta)
            row["d_crossover"] = (params.n_r / delta) ** (1.0 / params.nu)
        if trials > 0:
            est = run_trials(params, topo, trials, seed, workers)
            row["mc_dmimo_mean"], row["mc_dmimo_stderr"] = est.mean, est.std_error
            if cmimo_d is not None and scalar_alpha:
                est_c = run_trials(params, Centralized(cmimo_d), trials, seed, workers)
                row["mc_cmimo_mean"], row["mc_cmimo_stderr"] = est_c.mean, est_c.std_error
    elif isinstance(topo, Circular):
        if topo.user == "random":
            if nu_is_4:
                row["avg_se_dmimo"] = _circ.avg_se_urban(params, topo.r_c, topo.r_a)
                row["avg_se_cmimo_center"] = _circ.avg_se_urban(params, topo.r_c, 0.0)
        else:
            r_u = float(topo.user[0])
            row["se_cmimo_ring"] = _circ.se_circular_cmimo(params, r_u)
            row["se_dmimo_ring"] = _circ.se_circular_dmimo(params, r_u, topo.r_a)
        if trials > 0:
            est = run_trials(params, topo, trials, seed, workers)
            row["mc_dmimo_mean"], row["mc_dmimo_stderr"] = est.mean, est.std_error
            if topo.user != "random" and scalar_alpha:
                est_c = run_trials(params, Centralized(float(topo.user[0])), trials, seed, workers)
                row["mc_cmimo_mean"], row["mc_cmimo_stderr"] = est_c.mean, est_c.std_error
    return row


def sweep(params: SystemParams, topo: Topology, axis: str, grid, trials: int,
          seed: int, workers: int = 1, spacing_side: str = "t",
          cmimo_d: Optional[float] = None) -> SweepTable:
    """Run closed forms (and Monte Carlo when trials > 0) over one swept axis.

    A failing grid point records its error and the sweep continues; the
    table layout is fixed up front so every row carries the same columns.
    """
    validate(params, topo)
    if axis not in _AXES:
        raise ValidationError(f"unknown sweep axis {axis!r}; expected one of {_AXES}")
    if trials < 0:
        raise ValidationError(f"trials must be nonnegative, got {trials}")
    grid = [float(v) for v in grid]
    if not grid:
        raise ValidationError("sweep grid must be non-empty")
    scalar_alpha = np.asarray(params.alpha).size == 1
    nu_is_4 = abs(params.nu - 4.0) <= 1e-12
    columns = [axis] + _sweep_columns(topo, trials, cmimo_d, scalar_alpha, nu_is_4) + ["error"]

    rows: list[dict] = []
    for value in grid:
        row = {c: None for c in columns}
        row[axis] = value
        row["error"] = ""
        try:
            p_i, t_i, d_i = _with_axis_value(params, topo, axis, value, spacing_side, cmimo_d)
            validate(p_i, t_i)
            row.update(
                _sweep_row(p_i, t_i, trials, seed, workers, d_i, scalar_alpha, nu_is_4)
            )
        except (NumericError, ValidationError) as exc:
            row["error"] = str(exc)
        rows.append(row)

    meta = {
        "axis": axis,
        "trials": trials,
        "seed": seed,
        "workers": workers,
        "topology": type(topo).__name__,
        "n_t": params.n_t,
        "n_r": params.n_r,
    }
    return SweepTable(axis=axis, columns=columns, rows=rows, meta=meta)
