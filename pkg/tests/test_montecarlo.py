import math

import numpy as np
import pytest

from mimo_se import (
    Centralized,
    Circular,
    DistributedExplicit,
    SystemParams,
    ValidationError,
    estimate_target_matrix,
    lln_weighted_check,
    run_trials,
    se_dmimo_asymptotic,
    sweep,
)


def make_params(**over):
    base = dict(n_t=2, n_r=32, snr=10.0, nu=3.7, alpha=(10.0,))
    base.update(over)
    return SystemParams(**base)


SMALL_TOPO = DistributedExplicit(tuple(np.linspace(0.4, 1.2, 32)))


# ---------------------------------------------------------------------------
# run_trials


def test_estimate_is_reproducible():
    a = run_trials(make_params(), SMALL_TOPO, 50, seed=7)
    b = run_trials(make_params(), SMALL_TOPO, 50, seed=7)
    assert a == b
    c = run_trials(make_params(), SMALL_TOPO, 50, seed=8)
    assert c.mean != a.mean


def test_single_trial_has_no_spread():
    est = run_trials(make_params(), SMALL_TOPO, 1, seed=0)
    assert est.std_error == 0.0
    assert est.trials == 1


def test_error_bar_shrinks_with_more_trials():
    small = run_trials(make_params(), SMALL_TOPO, 100, seed=3)
    large = run_trials(make_params(), SMALL_TOPO, 400, seed=3)
    ratio = large.std_error / small.std_error
    assert 0.3 < ratio < 0.75  # n^(-1/2) predicts 0.5


def test_worker_count_does_not_change_the_answer():
    serial = run_trials(make_params(), SMALL_TOPO, 40, seed=5, workers=1)
    parallel = run_trials(make_params(), SMALL_TOPO, 40, seed=5, workers=3)
    assert serial.mean == parallel.mean
    assert serial.std_error == parallel.std_error


def test_mean_approaches_closed_form():
    params = make_params(n_r=128, alpha=(20.0,))
    topo = DistributedExplicit(tuple(np.linspace(0.4, 1.2, 128)))
    est = run_trials(params, topo, 400, seed=11)
    want = se_dmimo_asymptotic(params, topo.distances)
    assert abs(est.mean - want) / want < max(0.02, 3 * est.std_error / want)


def test_trial_count_validation():
    with pytest.raises(ValidationError, match="at least one trial"):
        run_trials(make_params(), SMALL_TOPO, 0, seed=0)
    with pytest.raises(ValidationError, match="workers"):
        run_trials(make_params(), SMALL_TOPO, 10, seed=0, workers=0)


def test_invalid_pair_caught_before_sampling():
    with pytest.raises(ValidationError, match="n_r must exceed n_t"):
        run_trials(make_params(n_t=64), SMALL_TOPO, 10, seed=0)


# ---------------------------------------------------------------------------
# target-matrix concentration


def test_concentration_statistics_fields():
    stats = estimate_target_matrix(make_params(), SMALL_TOPO, 64, seed=2)
    assert stats.rho_off.shape == (64,)
    assert stats.mean_diag.shape == (2,)
    assert stats.predicted_diag.shape == (2,)
    assert stats.median_rho_off > 0
    assert np.all(stats.predicted_diag > 0)


def test_off_diagonal_ratio_shrinks_with_array_size():
    medians = []
    for n_r in (16, 256):
        params = make_params(n_r=n_r)
        topo = DistributedExplicit(tuple(np.linspace(0.4, 1.2, n_r)))
        medians.append(estimate_target_matrix(params, topo, 64, seed=4).median_rho_off)
    assert medians[1] < 0.5 * medians[0]


def test_diagonal_tracks_prediction():
    params = make_params(n_r=256, alpha=(20.0,))
    topo = DistributedExplicit(tuple(np.linspace(0.4, 1.2, 256)))
    stats = estimate_target_matrix(params, topo, 200, seed=6)
    rel = np.abs(stats.mean_diag - stats.predicted_diag) / stats.predicted_diag
    assert np.max(rel) < 0.05


def test_concentration_needs_multiple_streams():
    with pytest.raises(ValidationError, match="n_t >= 2"):
        estimate_target_matrix(make_params(n_t=1), SMALL_TOPO, 8, seed=0)


# ---------------------------------------------------------------------------
# law-of-large-numbers checks


def test_lln_self_term_converges_to_weighted_mean():
    a = np.full(10_000, 2.0)
    self_err, cross = lln_weighted_check(a, "cscg", 10_000, seed=1)
    # p.p/n has mean sum(a)/n = 2; errors scale like n^(-1/2)
    assert self_err < 0.15
    assert cross < 0.15


def test_lln_errors_shrink_with_n():
    a_small = np.ones(100)
    a_large = np.ones(10_000)
    med = {}
    for n, a in ((100, a_small), (10_000, a_large)):
        errs = np.array([lln_weighted_check(a, "cscg", n, seed=s) for s in range(40)])
        med[n] = np.median(errs, axis=0)
    assert med[10_000][0] < 0.25 * med[100][0]
    assert med[10_000][1] < 0.25 * med[100][1]


def test_lln_shadowed_entries_center_on_omega():
    a = np.ones(20_000)
    self_err, _ = lln_weighted_check(a, "gamma_cscg", 20_000, seed=3,
                                     alpha=4.0, omega=2.0)
    assert self_err < 0.1


def test_lln_input_validation():
    with pytest.raises(ValidationError, match="length-10"):
        lln_weighted_check(np.ones(5), "cscg", 10, seed=0)
    with pytest.raises(ValidationError, match="finite"):
        lln_weighted_check(np.array([1.0, np.inf]), "cscg", 2, seed=0)
    with pytest.raises(ValidationError, match="unknown distribution"):
        lln_weighted_check(np.ones(4), "rayleigh", 4, seed=0)


# ---------------------------------------------------------------------------
# sweep


def test_snr_sweep_layout_and_determinism():
    params = make_params()
    t1 = sweep(params, Centralized(d=0.5), "snr_db", [0.0, 10.0], trials=20, seed=9)
    t2 = sweep(params, Centralized(d=0.5), "snr_db", [0.0, 10.0], trials=20, seed=9)
    assert t1.columns == ["snr_db", "se_cmimo_asym", "se_cmimo_high_snr",
                          "mc_cmimo_mean", "mc_cmimo_stderr", "error"]
    assert t1.rows == t2.rows
    assert all(row["error"] == "" for row in t1.rows)
    assert t1.rows[1]["se_cmimo_asym"] > t1.rows[0]["se_cmimo_asym"]


def test_sweep_without_trials_skips_monte_carlo():
    t = sweep(make_params(), Centralized(d=0.5), "snr_db", [0.0], trials=0, seed=0)
    assert "mc_cmimo_mean" not in t.columns


def test_sweep_rejects_unknown_axis():
    with pytest.raises(ValidationError, match="unknown sweep axis"):
        sweep(make_params(), Centralized(d=0.5), "bandwidth", [1.0], trials=0, seed=0)


def test_failing_grid_point_is_recorded_not_fatal():
    topo = Circular(r_c=1.0, r_a=0.2, user=(0.5, 0.0))
    t = sweep(make_params(nu=4.0), topo, "r_a", [0.3, 1.5], trials=0, seed=0)
    assert t.rows[0]["error"] == ""
    assert "inside cell" in t.rows[1]["error"]
    assert t.rows[1]["se_dmimo_ring"] is None


def test_distance_sweep_with_companion_colocated_curve():
    topo = DistributedExplicit(tuple(np.linspace(0.4, 1.2, 32)))
    t = sweep(make_params(), topo, "d", [0.2, 0.4], trials=0, seed=0, cmimo_d=0.3)
    assert "ordering" in t.columns
    assert t.rows[0]["d_cmimo"] == 0.2  # the axis moves the companion distance
    assert t.rows[0]["delta"] == t.rows[1]["delta"]
    orderings = {row["ordering"] for row in t.rows}
    assert orderings <= {"C_less", "C_greater", "equal"}


def test_spacing_sweep_moves_the_requested_side():
    params = make_params()
    t = sweep(params, Centralized(d=0.5), "spacing", [0.25, 4.0], trials=0,
              seed=0, spacing_side="t")
    # wider spacing means weaker correlation, more rate at these settings
    assert t.rows[1]["se_cmimo_asym"] > t.rows[0]["se_cmimo_asym"]
    t_r = sweep(params, Centralized(d=0.5), "spacing", [0.25, 4.0], trials=0,
                seed=0, spacing_side="r")
    # receive side never touches the closed form
    assert t_r.rows[0]["se_cmimo_asym"] == t_r.rows[1]["se_cmimo_asym"]


def test_array_growth_sweep():
    t = sweep(make_params(), Centralized(d=0.5), "n_r", [32, 128], trials=0, seed=0)
    assert t.rows[1]["se_cmimo_asym"] > t.rows[0]["se_cmimo_asym"]


def test_random_user_sweep_reports_disk_averages():
    params = make_params(nu=4.0)
    topo = Circular(r_c=1.0, r_a=0.3, user="random")
    t = sweep(params, topo, "r_a", [0.2, 0.7632314248053977], trials=0, seed=0)
    assert "avg_se_dmimo" in t.columns
    assert t.rows[1]["avg_se_dmimo"] > t.rows[0]["avg_se_dmimo"]


def test_sweep_grid_validation():
    with pytest.raises(ValidationError, match="non-empty"):
        sweep(make_params(), Centralized(d=0.5), "snr_db", [], trials=0, seed=0)
