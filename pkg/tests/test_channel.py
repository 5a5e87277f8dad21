import math

import numpy as np
import pytest

from mimo_se import (
    Centralized,
    ChannelRealization,
    Circular,
    DistributedExplicit,
    NumericError,
    RandomStream,
    SystemParams,
    ValidationError,
    coupling_matrix,
    draw_realization,
    eig_sym,
    exp_corr_spectrum,
    exp_correlation,
    large_scale_diag,
    spectral_efficiency,
    spectral_efficiency_direct,
    target_matrix,
)

LINEAR_SITES_100 = tuple((k + 100.0) / 500.0 for k in range(1, 101))


def make_params(**over):
    base = dict(n_t=2, n_r=8, snr=10.0, nu=3.7)
    base.update(over)
    return SystemParams(**base)


def flat_coupling(n_r, n_t):
    return coupling_matrix(np.ones(n_r), np.ones(n_t))


# ---------------------------------------------------------------------------
# large-scale gains


def test_unit_distance_unit_shadowing_gives_unit_gain():
    g = large_scale_diag(Centralized(d=1.0), 4.0, np.array([1.0]), 5)
    np.testing.assert_array_equal(g, np.ones(5))


def test_powers_of_two_profile():
    g = large_scale_diag(DistributedExplicit((0.5, 2.0)), 4.0, np.ones(2), 2)
    np.testing.assert_allclose(g, [16.0, 0.0625], rtol=1e-15)


def test_linear_site_profile_sums_to_delta():
    # independent reference: plain python accumulation
    want = sum(((k + 100.0) / 500.0) ** -3.7 for k in range(1, 101))
    g = large_scale_diag(DistributedExplicit(LINEAR_SITES_100), 3.7,
                         np.ones(100), 100)
    assert math.isclose(math.fsum(g), want, rel_tol=1e-13)
    assert math.isclose(want, 11908.26463472526, rel_tol=1e-12)


def test_colocated_gain_replicates_one_draw():
    g = large_scale_diag(Centralized(d=0.5), 3.0, np.array([2.0]), 6)
    np.testing.assert_allclose(g, np.full(6, 2.0 * 0.5**-3.0), rtol=1e-15)


def test_shadowing_must_be_positive_and_sized():
    with pytest.raises(ValidationError, match="positive"):
        large_scale_diag(Centralized(d=1.0), 4.0, np.array([0.0]), 3)
    with pytest.raises(ValidationError, match="per antenna"):
        large_scale_diag(DistributedExplicit((1.0, 2.0)), 4.0, np.ones(3), 2)
    with pytest.raises(ValidationError, match="single shadowing"):
        large_scale_diag(Centralized(d=1.0), 4.0, np.ones(4), 4)


def test_ring_topology_distances_feed_gains():
    topo = Circular(r_c=1.0, r_a=0.2, user=(0.5, 0.0))
    g = large_scale_diag(topo, 4.0, np.ones(4), 4)
    # antennas at angles 0, 90, 180, 270 for a user on the x axis
    d = np.sqrt([0.09, 0.29, 0.49, 0.29])
    np.testing.assert_allclose(g, d**-4.0, rtol=1e-12)


def test_unresolved_random_user_is_rejected():
    topo = Circular(r_c=1.0, r_a=0.2, user="random")
    with pytest.raises(ValidationError, match="random user"):
        large_scale_diag(topo, 4.0, np.ones(4), 4)


# ---------------------------------------------------------------------------
# target matrix


def test_single_transmit_antenna_matrix_is_weighted_power_sum():
    params = make_params(n_t=1, n_r=16)
    lam_r = exp_corr_spectrum(0.6, 16)
    g = coupling_matrix(lam_r, np.ones(1))
    real = draw_realization(params, Centralized(d=0.7), g, RandomStream(3, 0))
    m = target_matrix(real)
    want = np.sum(real.gains * lam_r * np.abs(real.h_hat[:, 0]) ** 2)
    assert m.shape == (1, 1)
    assert math.isclose(m[0, 0].real, want, rel_tol=1e-12)


def test_entries_match_elementwise_definition():
    # brute-force double loop over the defining sum
    params = make_params(n_t=3, n_r=6, theta_t=0.4, theta_r=0.8)
    lam_t = exp_corr_spectrum(0.4, 3)
    lam_r = exp_corr_spectrum(0.8, 6)
    g = coupling_matrix(lam_r, lam_t)
    real = draw_realization(params, Centralized(d=0.9), g, RandomStream(5, 1))
    m = target_matrix(real)
    for i in range(3):
        for j in range(3):
            want = sum(
                math.sqrt(lam_t[i] * lam_t[j]) * lam_r[k] * real.gains[k]
                * np.conj(real.h_hat[k, i]) * real.h_hat[k, j]
                for k in range(6)
            )
            assert abs(m[i, j] - want) < 1e-12 * max(1.0, abs(want))


def test_matrix_is_hermitian_psd():
    params = make_params(n_t=4, n_r=32, theta_t=0.5, theta_r=0.3)
    g = coupling_matrix(exp_corr_spectrum(0.3, 32), exp_corr_spectrum(0.5, 4))
    m = target_matrix(draw_realization(params, Centralized(d=0.4), g, RandomStream(1, 2)))
    np.testing.assert_allclose(m, m.conj().T, rtol=0, atol=1e-14)
    assert np.min(np.linalg.eigvalsh(m)) > -1e-10


def test_diagonal_expectation_matches_limit():
    # E[M_ii] = lambda_T_i * omega * sum_k d_k^-nu, any n_r
    n_r, n_t, trials = 64, 2, 4000
    dist = tuple(np.linspace(0.4, 1.5, n_r))
    params = make_params(n_t=n_t, n_r=n_r, theta_t=0.7, alpha=(6.0,), omega=2.0)
    lam_t = exp_corr_spectrum(0.7, n_t)
    g = coupling_matrix(np.ones(n_r), lam_t)
    topo = DistributedExplicit(dist)
    acc = np.zeros(n_t)
    acc2 = np.zeros(n_t)
    for i in range(trials):
        m = target_matrix(draw_realization(params, topo, g, RandomStream(17, i)))
        d = np.real(np.diag(m))
        acc += d
        acc2 += d * d
    mean = acc / trials
    se = np.sqrt((acc2 / trials - mean**2) / trials)
    delta = float(np.sum(np.asarray(dist) ** -3.7))
    want = lam_t * 2.0 * delta
    assert np.all(np.abs(mean - want) < 3.5 * se)


# ---------------------------------------------------------------------------
# spectral efficiency


def test_zero_matrix_gives_zero_bits():
    assert spectral_efficiency(np.zeros((3, 3)), 100.0, 3) == 0.0


def test_scalar_matrix_closed_form():
    got = spectral_efficiency(np.array([[5.0]]), 2.0, 1)
    assert math.isclose(got, math.log2(11.0), rel_tol=1e-14)


def test_diagonal_matrix_splits_into_stream_sum():
    got = spectral_efficiency(np.diag([3.0, 1.0]), 2.0, 2)
    assert math.isclose(got, math.log2(4.0) + math.log2(2.0), rel_tol=1e-14)


def test_matches_logdet_oracle_on_random_hermitian():
    rng = np.random.default_rng(0)
    for n_t in (1, 2, 5):
        b = rng.normal(size=(n_t, n_t)) + 1j * rng.normal(size=(n_t, n_t))
        m = b.conj().T @ b
        got = spectral_efficiency(m, 3.5, n_t)
        sign, logdet = np.linalg.slogdet(np.eye(n_t) + (3.5 / n_t) * m)
        assert sign > 0
        assert math.isclose(got, logdet / math.log(2.0), rel_tol=1e-12)


def test_indefinite_matrix_raises_numeric_error():
    with pytest.raises(NumericError, match="not PSD"):
        spectral_efficiency(np.array([[-2.0]]), 1.0, 1)


def test_snr_validation():
    with pytest.raises(ValidationError, match="snr"):
        spectral_efficiency(np.eye(2), 0.0, 2)


def test_monotone_in_snr_and_gain():
    params = make_params(n_t=2, n_r=12)
    g = flat_coupling(12, 2)
    real = draw_realization(params, Centralized(d=0.5), g, RandomStream(2, 0))
    m = target_matrix(real)
    se1 = spectral_efficiency(m, 1.0, 2)
    se2 = spectral_efficiency(m, 4.0, 2)
    assert se2 > se1 > 0.0
    boosted = ChannelRealization(
        h_hat=real.h_hat, shadowing=real.shadowing, gains=2.0 * real.gains,
        coupling=real.coupling, scheme=real.scheme)
    assert spectral_efficiency(target_matrix(boosted), 1.0, 2) > se1


def test_uncorrelated_unit_gain_reduces_to_plain_gram():
    params = make_params(n_t=2, n_r=10, alpha=(1e9,))  # shadowing pinned at 1
    g = flat_coupling(10, 2)
    real = draw_realization(params, Centralized(d=1.0), g, RandomStream(4, 0))
    m = target_matrix(real)
    want = real.gains[0] * (real.h_hat.conj().T @ real.h_hat)
    np.testing.assert_allclose(m, want, rtol=1e-12)


# ---------------------------------------------------------------------------
# reduced form versus full-channel oracle


@pytest.mark.parametrize("scheme_topo", [
    Centralized(d=0.6),
    DistributedExplicit(tuple(np.linspace(0.3, 1.1, 8))),
])
def test_reduced_matrix_matches_full_channel(scheme_topo):
    params = make_params(n_t=2, n_r=8, theta_t=0.5, theta_r=0.7, alpha=(4.0,))
    lam_t, u_t = eig_sym(exp_correlation(0.5, 2), return_vectors=True)
    if isinstance(scheme_topo, Centralized):
        lam_r, u_r = eig_sym(exp_correlation(0.7, 8), return_vectors=True)
    else:
        lam_r, u_r = np.ones(8), np.eye(8)
    g = coupling_matrix(lam_r, lam_t)
    for trial in range(5):
        real = draw_realization(params, scheme_topo, g, RandomStream(8, trial),
                                u_t=u_t, u_r=u_r)
        fast = spectral_efficiency(target_matrix(real), params.snr, params.n_t)
        slow = spectral_efficiency_direct(real, params.snr)
        assert math.isclose(fast, slow, rel_tol=1e-10)


def test_direct_path_requires_eigenvectors():
    params = make_params()
    g = flat_coupling(8, 2)
    real = draw_realization(params, Centralized(d=0.5), g, RandomStream(0, 0))
    with pytest.raises(ValidationError, match="u_t"):
        spectral_efficiency_direct(real, 10.0)


def test_transmit_basis_rotation_leaves_se_unchanged():
    # det(I + rho/n_t H^H H) ignores any unitary applied on the transmit side
    params = make_params(n_t=3, n_r=9, theta_t=0.6)
    lam_t, u_t = eig_sym(exp_correlation(0.6, 3), return_vectors=True)
    g = coupling_matrix(np.ones(9), lam_t)
    topo = DistributedExplicit(tuple(np.linspace(0.5, 1.0, 9)))
    rng = np.random.default_rng(12)
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
    real = draw_realization(params, topo, g, RandomStream(6, 0), u_t=u_t)
    scrambled = ChannelRealization(
        h_hat=real.h_hat, shadowing=real.shadowing, gains=real.gains,
        coupling=real.coupling, scheme="D", u_t=u_t @ q)
    assert math.isclose(
        spectral_efficiency_direct(real, params.snr),
        spectral_efficiency_direct(scrambled, params.snr),
        rel_tol=1e-10,
    )


# ---------------------------------------------------------------------------
# draw_realization bookkeeping


def test_draw_is_reproducible_and_stream_separated():
    params = make_params()
    g = flat_coupling(8, 2)
    topo = Centralized(d=0.4)
    r1 = draw_realization(params, topo, g, RandomStream(42, 7))
    r2 = draw_realization(params, topo, g, RandomStream(42, 7))
    r3 = draw_realization(params, topo, g, RandomStream(42, 8))
    assert np.array_equal(r1.h_hat, r2.h_hat)
    assert np.array_equal(r1.shadowing, r2.shadowing)
    assert not np.array_equal(r1.h_hat, r3.h_hat)


def test_scheme_tags_and_shadowing_shapes():
    params = make_params(alpha=(8.0,))
    g = flat_coupling(8, 2)
    rc = draw_realization(params, Centralized(d=0.4), g, RandomStream(0, 0))
    assert rc.scheme == "C" and rc.shadowing.shape == (1,)
    rd = draw_realization(
        params, DistributedExplicit(tuple(np.linspace(0.2, 1.0, 8))), g,
        RandomStream(0, 0))
    assert rd.scheme == "D" and rd.shadowing.shape == (8,)
    assert np.all(rd.gains > 0)


def test_random_ring_user_is_resolved_per_draw():
    params = make_params()
    g = flat_coupling(8, 2)
    topo = Circular(r_c=1.0, r_a=0.3, user="random")
    r1 = draw_realization(params, topo, g, RandomStream(9, 0))
    r2 = draw_realization(params, topo, g, RandomStream(9, 1))
    assert r1.gains.shape == (8,)
    assert not np.array_equal(r1.gains, r2.gains)


def test_receive_correlation_immaterial_for_wide_colocated_array():
    # With n_r large the receive eigenvalue spread washes out of the log-det.
    n_r, trials = 200, 300
    means = []
    for theta_r in (0.0, 0.4723665527410147, 0.7788007830714049):
        params = make_params(n_t=2, n_r=n_r, theta_r=theta_r, alpha=(1e9,),
                             snr=10.0)
        lam_r = exp_corr_spectrum(theta_r, n_r)
        g = coupling_matrix(lam_r, np.ones(2))
        acc = 0.0
        for i in range(trials):
            real = draw_realization(params, Centralized(d=0.5), g, RandomStream(33, i))
            acc += spectral_efficiency(target_matrix(real), params.snr, 2)
        means.append(acc / trials)
    spread = (max(means) - min(means)) / means[0]
    assert spread < 0.01
