"""System parameters and deployment topologies for the downlink model.

All quantities are linear scale and distances are normalized by the
reference distance; the CLI layer owns dB and meter conversions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ValidationError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SystemParams:
    """Link-level parameters common to every scheme.

    Correlation coefficients follow theta = exp(-L / Delta) for antenna
    spacing L and coherence distance Delta, so theta_t/theta_r live in
    [0, 1). `alpha` is the Gamma shadowing shape, one shared value or one
    per receive antenna; `omega` is the mean local shadowing power.
    """

    n_t: int
    n_r: int
    snr: float          # transmit SNR rho, linear
    nu: float           # path-loss exponent
    omega: float = 1.0
    alpha: tuple[float, ...] = (1.0,)
    theta_t: float = 0.0
    theta_r: float = 0.0

    def alpha_vector(self, n_links: int) -> np.ndarray:
        """Per-link shadowing shapes, broadcasting a shared scalar."""
        a = np.asarray(self.alpha, dtype=float)
        if a.size == 1:
            return np.full(n_links, float(a.reshape(-1)[0]))
        return a.astype(float, copy=True)


@dataclass(frozen=True)
class Centralized:
    """All receive antennas co-located at one point, common link distance d."""

    d: float


@dataclass(frozen=True)
class DistributedExplicit:
    """One receive antenna per site, with an explicit distance per link."""

    distances: tuple[float, ...]


@dataclass(frozen=True)
class Circular:
    """Antennas uniformly spaced on a ring of radius r_a inside a cell of
    radius r_c; the user sits at polar position (r_u, phi) or is drawn
    uniformly over the disk per trial when user == "random".
    """

    r_c: float
    r_a: float
    user: Union[tuple[float, float], str] = "random"


Topology = Union[Centralized, DistributedExplicit, Circular]


def _check_params(p: SystemParams, problems: list[str]) -> None:
    if not isinstance(p.n_t, int) or p.n_t < 1:
        problems.append(f"n_t must be a positive integer, got {p.n_t!r}")
    if not isinstance(p.n_r, int) or p.n_r < 1:
        problems.append(f"n_r must be a positive integer, got {p.n_r!r}")
    if isinstance(p.n_t, int) and isinstance(p.n_r, int) and p.n_r <= p.n_t:
        problems.append(
            f"n_r must exceed n_t (tall channel matrix), got n_r={p.n_r}, n_t={p.n_t}"
        )
    if not (p.snr > 0.0) or not math.isfinite(p.snr):
        problems.append(f"snr must be a positive finite linear value, got {p.snr!r}")
    if not (p.nu > 2.0):
        problems.append(f"path-loss exponent must exceed 2, got nu={p.nu!r}")
    if not (p.omega > 0.0) or not math.isfinite(p.omega):
        problems.append(f"omega must be positive and finite, got {p.omega!r}")
    alpha = np.asarray(p.alpha, dtype=float)
    if alpha.ndim != 1 or alpha.size not in (1, p.n_r):
        problems.append(
            f"alpha must have length 1 or n_r={p.n_r}, got length {alpha.size}"
        )
    if alpha.size and not np.all(alpha > 0.5):
        problems.append("every shadowing shape alpha must exceed 0.5")
    for name, theta in (("theta_t", p.theta_t), ("theta_r", p.theta_r)):
        if not (0.0 <= theta < 1.0):
            problems.append(f"{name} must lie in [0, 1), got {theta!r}")


def _check_topology(p: SystemParams, topo: Topology, problems: list[str]) -> None:
    if isinstance(topo, Centralized):
        if not (topo.d > 0.0) or not math.isfinite(topo.d):
            problems.append(f"common link distance d must be positive, got {topo.d!r}")
        if np.asarray(p.alpha).size != 1:
            problems.append(
                "a co-located array sees one shadowing draw; alpha must have length 1"
            )
    elif isinstance(topo, DistributedExplicit):
        dist = np.asarray(topo.distances, dtype=float)
        if dist.size != p.n_r:
            problems.append(
                f"need one distance per receive antenna: got {dist.size}, n_r={p.n_r}"
            )
        if dist.size and not np.all((dist > 0.0) & np.isfinite(dist)):
            problems.append("all link distances must be positive and finite")
    elif isinstance(topo, Circular):
        if not (topo.r_c > 0.0) or not math.isfinite(topo.r_c):
            problems.append(f"cell radius r_c must be positive, got {topo.r_c!r}")
        if not (0.0 <= topo.r_a < topo.r_c):
            problems.append(
                f"ring radius must be inside cell: need 0 <= r_a < r_c, "
                f"got r_a={topo.r_a!r}, r_c={topo.r_c!r}"
            )
        if topo.user != "random":
            if (
                not isinstance(topo.user, tuple)
                or len(topo.user) != 2
                or not all(isinstance(v, (int, float)) for v in topo.user)
            ):
                problems.append(
                    'circular user must be "random" or a (r_u, phi) pair, '
                    f"got {topo.user!r}"
                )
            else:
                r_u, phi = topo.user
                if not (0.0 < r_u <= topo.r_c):
                    problems.append(
                        f"user radius must satisfy 0 < r_u <= r_c, got r_u={r_u!r}"
                    )
                if not (0.0 <= phi < TWO_PI):
                    problems.append(f"user angle must lie in [0, 2*pi), got {phi!r}")
    else:
        problems.append(f"unknown topology {type(topo).__name__}")


def validate(params: SystemParams, topo: Topology) -> tuple[SystemParams, Topology]:
    """Check every model invariant; raise ValidationError listing all failures.

    Pure and idempotent: returns the pair unchanged on success.
    """
    problems: list[str] = []
    _check_params(params, problems)
    _check_topology(params, topo, problems)
    if problems:
        raise ValidationError("; ".join(problems))
    return params, topo
