"""Channel realizations and instantaneous spectral efficiency.

A realization factors into independent pieces: the large-scale diagonal
d_k^(-nu) * phi_k, the rank-one eigenmode coupling, and an i.i.d. CSCG
fast-fading core. The n_t x n_t target matrix

    M[i, j] = sum_k sqrt(lam_T_i lam_T_j) lam_R_k gain_k conj(H[k,i]) H[k,j]

carries everything the log-det needs, so the hot path never materializes
the full n_r x n_t channel; the full assembly survives only as the
spectral_efficiency_direct cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import circular as _circ
from .errors import NumericError, ValidationError
from .params import Centralized, Circular, DistributedExplicit, SystemParams, Topology
from .stochastic import RandomStream, sample_cscg, sample_shadowing

LN2 = math.log(2.0)
_CHOL_JITTER = 1e-12


@dataclass
class ChannelRealization:
    """One draw of the link: fading core, shadowing, large-scale gains.

    `scheme` is "C" (co-located; one shared shadowing value, unitary receive
    eigenbasis in front) or "D" (distributed; per-link gains, no receive
    mixing). u_t/u_r hold eigenvector factors only when the full-matrix
    oracle path will be used.
    """

    h_hat: np.ndarray          # n_r x n_t CSCG core
    shadowing: np.ndarray      # length 1 (scheme C) or n_r (scheme D)
    gains: np.ndarray          # large-scale diagonal, length n_r
    coupling: np.ndarray       # n_r x n_t eigenmode amplitude coupling
    scheme: str
    u_t: np.ndarray | None = None
    u_r: np.ndarray | None = None


def large_scale_diag(
    topo: Topology, nu: float, shadowing: np.ndarray, n_r: int
) -> np.ndarray:
    """Large-scale power gains d_k^(-nu) * phi_k for each receive antenna.

    The co-located array has one distance and one shadowing draw replicated
    across antennas; distributed layouts pair per-link distances with
    per-link draws.
    """
    phi = np.atleast_1d(np.asarray(shadowing, dtype=float))
    if np.any(phi <= 0.0):
        raise ValidationError("shadowing draws must be positive")
    if isinstance(topo, Centralized):
        if phi.size != 1:
            raise ValidationError("co-located array takes a single shadowing draw")
        return np.full(n_r, topo.d ** (-nu) * phi[0])
    if isinstance(topo, DistributedExplicit):
        dist = np.asarray(topo.distances, dtype=float)
    elif isinstance(topo, Circular):
        if topo.user == "random":
            raise ValidationError("resolve the random user before building gains")
        geom = _circ.RingGeometry(topo.r_c, topo.r_a, topo.user[0], topo.user[1])
        dist = _circ.user_antenna_distances(geom, n_r)
    else:
        raise ValidationError(f"unknown topology {type(topo).__name__}")
    if dist.size != n_r or phi.size != n_r:
        raise ValidationError(
            f"need one distance and one shadowing draw per antenna, "
            f"got {dist.size} distances and {phi.size} draws for n_r={n_r}"
        )
    return dist ** (-nu) * phi


def draw_realization(
    params: SystemParams,
    topo: Topology,
    coupling: np.ndarray,
    stream: RandomStream,
    u_t: np.ndarray | None = None,
    u_r: np.ndarray | None = None,
) -> ChannelRealization:
    """Draw one channel realization from the stream.

    Draw order is fixed (user position if random, fading core, shadowing) so
    a (seed, stream_id) pair pins the realization bit-for-bit. `coupling` is
    trial-invariant and therefore passed in precomputed.
    """
    if isinstance(topo, Circular) and topo.user == "random":
        r_u = _circ.sample_user_radius(stream, topo.r_c)
        while abs(r_u - topo.r_a) <= 1e-9 * topo.r_c:
            r_u = _circ.sample_user_radius(stream, topo.r_c)
        phi_angle = stream.gen.uniform(0.0, 2.0 * np.pi)
        topo = Circular(topo.r_c, topo.r_a, (r_u, phi_angle))

    h_hat = sample_cscg(stream, params.n_r, params.n_t)
    if isinstance(topo, Centralized):
        scheme = "C"
        phi = np.array([sample_shadowing(stream, params.alpha_vector(1)[0], params.omega)])
    else:
        scheme = "D"
        phi = sample_shadowing(stream, params.alpha_vector(params.n_r), params.omega)
    gains = large_scale_diag(topo, params.nu, phi, params.n_r)
    return ChannelRealization(
        h_hat=h_hat,
        shadowing=phi,
        gains=gains,
        coupling=coupling,
        scheme=scheme,
        u_t=u_t,
        u_r=u_r,
    )


def target_matrix(real: ChannelRealization) -> np.ndarray:
    """Reduced n_t x n_t Gram matrix of the weighted fading core.

    Computed as W^H W with W[k, i] = sqrt(gain_k) * coupling[k, i] * h_hat[k, i],
    which is O(n_r * n_t^2) and Hermitian PSD by construction.
    """
    w = np.sqrt(real.gains)[:, None] * real.coupling * real.h_hat
    m = w.conj().T @ w
    return 0.5 * (m + m.conj().T)


def spectral_efficiency(m: np.ndarray, snr: float, n_t: int) -> float:
    """log2 det(I + (snr/n_t) * M) through a Cholesky factorization.

    One diagonal jitter of 1e-12 is allowed before declaring the matrix
    numerically indefinite.
    """
    if not (snr > 0.0 and math.isfinite(snr)):
        raise ValidationError(f"snr must be positive and finite, got {snr!r}")
    k = np.eye(n_t) + (snr / n_t) * np.asarray(m)
    try:
        chol = np.linalg.cholesky(k)
    except np.linalg.LinAlgError:
        try:
            chol = np.linalg.cholesky(k + _CHOL_JITTER * np.eye(n_t))
        except np.linalg.LinAlgError as exc:
            raise NumericError(
                "log-det factorization failed beyond jitter; matrix is not PSD"
            ) from exc
    diag = np.abs(np.diag(chol))
    return float(2.0 * np.sum(np.log(diag)) / LN2)


def spectral_efficiency_direct(real: ChannelRealization, snr: float) -> float:
    """Oracle path: assemble the full n_r x n_t channel and take its log-det.

    Needs the eigenvector factors stored on the realization. Matches
    spectral_efficiency(target_matrix(...)) to rounding error because the
    unitary factors drop out of det(I + H^H H).
    """
    if real.u_t is None:
        raise ValidationError("direct evaluation needs u_t on the realization")
    core = real.coupling * real.h_hat
    if real.scheme == "C":
        if real.u_r is None:
            raise ValidationError("co-located direct evaluation needs u_r")
        h = math.sqrt(real.gains[0]) * (real.u_r @ core @ real.u_t.conj().T)
    else:
        h = np.sqrt(real.gains)[:, None] * (core @ real.u_t.conj().T)
    n_t = h.shape[1]
    m = h.conj().T @ h
    return spectral_efficiency(0.5 * (m + m.conj().T), snr, n_t)
