"""Circular deployments: ring geometry, the ring distance moment, per-user
and cell-averaged spectral efficiency, and the optimal ring radius.

Antennas sit at angles 2*pi*k/n_r on a ring of radius r_a inside a cell of
radius r_c; the user is at polar position (r_u, phi). Everything here is
deterministic except sample_user_radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import asymptotic, correlation
from .errors import NumericError, ValidationError
from .params import SystemParams
from .stochastic import RandomStream

LN2 = math.log(2.0)
#: A user closer to the ring than this (relative to r_c) is "on the ring".
_ON_RING_GUARD = 1e-9
#: Quadrature controls: panel doubling until this relative change, hard cap.
_QUAD_TOL = 1e-12
_QUAD_MAX_PANELS = 1 << 20


@dataclass(frozen=True)
class RingGeometry:
    """Concrete ring layout with a fixed user position."""

    r_c: float
    r_a: float
    r_u: float
    phi: float = 0.0


def antenna_angles(n_r: int) -> np.ndarray:
    """Ring angles 2*pi*k/n_r for k = 0..n_r-1."""
    if n_r < 1:
        raise ValidationError(f"n_r must be positive, got {n_r}")
    return 2.0 * np.pi * np.arange(n_r) / n_r


def user_antenna_distances(geom: RingGeometry, n_r: int) -> np.ndarray:
    """Law-of-cosines distances from the user to each ring antenna."""
    if not (0.0 < geom.r_u <= geom.r_c):
        raise ValidationError(f"user radius must satisfy 0 < r_u <= r_c, got {geom.r_u!r}")
    if not (0.0 <= geom.r_a < geom.r_c):
        raise ValidationError("ring radius must be inside cell")
    if abs(geom.r_u - geom.r_a) <= _ON_RING_GUARD * geom.r_c:
        raise ValidationError(
            f"user sits on the antenna ring (|r_u - r_a| <= {_ON_RING_GUARD} * r_c); "
            "distances are singular there"
        )
    ang = antenna_angles(n_r)
    sq = (
        geom.r_u**2
        + geom.r_a**2
        - 2.0 * geom.r_u * geom.r_a * np.cos(ang - geom.phi)
    )
    return np.sqrt(sq)


def _trapezoid_doubling(f, a: float, b: float, start_panels: int) -> float:
    """Composite trapezoid with panel doubling until _QUAD_TOL relative change.

    `f` must accept a vector of nodes. Intended for smooth (periodic-extension
    smooth) integrands where doubling converges fast; the panel cap guards the
    pathological cases.
    """
    panels = start_panels
    ys = f(np.linspace(a, b, panels + 1))
    prev = (b - a) / panels * float(np.sum(ys) - 0.5 * (ys[0] + ys[-1]))
    while panels < _QUAD_MAX_PANELS:
        panels *= 2
        # Only the new midpoints need evaluating.
        mid = np.linspace(a, b, panels + 1)[1::2]
        total = 0.5 * prev + (b - a) / panels * float(np.sum(f(mid)))
        if abs(total - prev) <= _QUAD_TOL * max(abs(total), 1e-300):
            return total
        prev = total
    raise NumericError(f"quadrature did not converge within {_QUAD_MAX_PANELS} panels")


def legendre_p(c: float, x: float) -> float:
    """Legendre function P_c(x) of real degree c >= 0 for x >= 1.

    Evaluated through the Laplace integral
    P_c(x) = (1/pi) * int_0^pi (x + sqrt(x^2 - 1) cos t)^c dt,
    whose integrand extends to a smooth periodic function, so the doubling
    trapezoid rule converges geometrically.
    """
    if x < 1.0:
        raise ValidationError(f"argument must satisfy x >= 1, got {x!r}")
    if c < 0.0:
        raise ValidationError(f"degree must be nonnegative, got {c!r}")
    if x == 1.0 or c == 0.0:
        return 1.0
    root = math.sqrt(x * x - 1.0)

    def integrand(t: np.ndarray) -> np.ndarray:
        return (x + root * np.cos(t)) ** c

    return _trapezoid_doubling(integrand, 0.0, math.pi, 64) / math.pi


def ring_distance_moment(r_u: float, r_a: float, nu: float) -> float:
    """Large-ring limit of the average inverse-power distance to the ring.

    lim (1/n_r) sum_k d_k^(-nu)
        = |r_u^2 - r_a^2|^(-nu/2) * P_{nu/2-1}((r_u^2 + r_a^2)/|r_u^2 - r_a^2|),
    which reduces to (r_u^2 + r_a^2)/|r_u^2 - r_a^2|^3 at nu = 4 and to
    r_u^(-nu) when the ring collapses to the center.
    """
    if not (r_u > 0.0):
        raise ValidationError(f"user radius must be positive, got {r_u!r}")
    if r_a < 0.0:
        raise ValidationError(f"ring radius must be nonnegative, got {r_a!r}")
    if not (nu > 2.0):
        raise ValidationError(f"path-loss exponent must exceed 2, got nu={nu!r}")
    if r_a == 0.0:
        return r_u ** (-nu)
    if abs(r_u - r_a) <= _ON_RING_GUARD * max(r_u, r_a):
        raise ValidationError("user sits on the antenna ring; the moment diverges")
    gap = abs(r_u**2 - r_a**2)
    ratio = (r_u**2 + r_a**2) / gap
    if nu == 4.0:
        return ratio / gap**2
    return gap ** (-0.5 * nu) * legendre_p(0.5 * nu - 1.0, ratio)


def se_circular_cmimo(params: SystemParams, r_u: float) -> float:
    """Large-n_r spectral efficiency with the array co-located at the center."""
    return asymptotic.se_cmimo_asymptotic(params, r_u)


def se_circular_dmimo(params: SystemParams, r_u: float, r_a: float) -> float:
    """Large-n_r spectral efficiency of the ring deployment for one user.

    sum_i log2(1 + beta_i * moment) with beta_i = n_r * (snr/n_t) *
    lambda_{T,i} * omega and the ring distance moment above.
    """
    lam_t = correlation.exp_corr_spectrum(params.theta_t, params.n_t)
    beta = params.n_r * (params.snr / params.n_t) * lam_t * params.omega
    moment = ring_distance_moment(r_u, r_a, params.nu)
    return float(np.sum(np.log1p(beta * moment)) / LN2)


def sample_user_radius(stream: RandomStream, r_c: float) -> float:
    """Radius of a user uniform over the disk: density 2x/r_c^2, so r_c*sqrt(U)."""
    if not (r_c > 0.0):
        raise ValidationError(f"cell radius must be positive, got {r_c!r}")
    u = 1.0 - stream.gen.random()  # in (0, 1]: keeps the radius strictly positive
    return r_c * math.sqrt(u)


def avg_se_urban(params: SystemParams, r_c: float, r_a: float) -> float:
    """Disk-averaged high-SNR spectral efficiency of the ring at nu = 4.

    Closed form of the average of se_circular_dmimo over a uniformly
    distributed user, valid only for path-loss exponent 4:

        2 n_t log2(e) - 4 n_t (r_a^2/r_c^2) log2(r_a^2)
        - 3 n_t (1 - r_a^2/r_c^2) log2(r_c^2 - r_a^2)
        + n_t (1 + r_a^2/r_c^2) log2(r_c^2 + r_a^2) + sum_i log2(beta_i)
    """
    if abs(params.nu - 4.0) > 1e-12:
        raise ValidationError(
            f"closed-form disk average requires path-loss exponent 4, got nu={params.nu!r}"
        )
    if not (r_c > 0.0):
        raise ValidationError(f"cell radius must be positive, got {r_c!r}")
    if not (0.0 <= r_a < r_c):
        raise ValidationError("ring radius must be inside cell")
    lam_t = correlation.exp_corr_spectrum(params.theta_t, params.n_t)
    beta = params.n_r * (params.snr / params.n_t) * lam_t * params.omega
    n_t = float(params.n_t)
    q = (r_a / r_c) ** 2

    total = 2.0 * n_t / LN2  # 2 n_t log2(e)
    if r_a > 0.0:
        total -= 4.0 * n_t * q * math.log2(r_a**2)
    if r_a < r_c - 1e-12:
        total -= 3.0 * n_t * (1.0 - q) * math.log2(r_c**2 - r_a**2)
    total += n_t * (1.0 + q) * math.log2(r_c**2 + r_a**2)
    total += float(np.sum(np.log2(beta)))
    return total


def _ring_objective_slope(r_c: float, r_a: float) -> float:
    """Sign-carrying factor of d(avg_se_urban)/d(r_a): 3 log2(chi-2) + log2(chi)."""
    chi = (r_c / r_a) ** 2 + 1.0
    return 3.0 * math.log2(chi - 2.0) + math.log2(chi)


def optimal_ring_radius(r_c: float) -> tuple[float, float]:
    """Ring radius maximizing the disk-averaged nu=4 spectral efficiency.

    Solves chi * (chi - 2)^3 = 1 on (2, 10] by bisection to a 1e-12 bracket
    plus a Newton polish, then maps back through chi = (r_c/r_a)^2 + 1.
    Returns (r_a_opt, chi0); the optimum is independent of SNR and antenna
    counts. Raises NumericError if the stationary point fails to be a
    maximum under a numerical sign check.
    """
    if not (r_c > 0.0):
        raise ValidationError(f"cell radius must be positive, got {r_c!r}")

    def f(chi: float) -> float:
        return chi * (chi - 2.0) ** 3 - 1.0

    lo, hi = 2.0, 10.0
    if not (f(lo) < 0.0 < f(hi)):  # f(2) = -1 by construction
        raise NumericError("root bracket for the ring-radius equation is invalid")
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    chi0 = 0.5 * (lo + hi)
    fprime = (chi0 - 2.0) ** 3 + 3.0 * chi0 * (chi0 - 2.0) ** 2
    chi0 -= f(chi0) / fprime

    r_a_opt = r_c / math.sqrt(chi0 - 1.0)
    # The analytic derivative must change sign + -> - across the optimum.
    eps = 1e-6 * r_c
    if not (
        _ring_objective_slope(r_c, r_a_opt - eps) > 0.0
        > _ring_objective_slope(r_c, r_a_opt + eps)
    ):
        raise NumericError("stationary ring radius is not a maximum")
    return r_a_opt, chi0
