"""Exponential antenna correlation and its spectral structure.

An array with spacing L and coherence distance Delta gets the Toeplitz
correlation [Theta]_{k,l} = theta^|k-l| with theta = exp(-L/Delta). The
module provides the matrix itself, a dependency-free symmetric eigensolver,
the limiting eigenvalue density of the Toeplitz family, and the rank-one
power coupling used by the channel model.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import NumericError, ValidationError

#: Hard cap on cyclic Jacobi sweeps before declaring non-convergence.
_MAX_SWEEPS = 100
#: Relative off-diagonal Frobenius tolerance at which iteration stops.
_OFF_TOL = 1e-12


def exp_correlation(theta: float, n: int) -> np.ndarray:
    """Exponential correlation matrix theta^|k-l| of order n."""
    if not (0.0 <= theta < 1.0):
        raise ValidationError(f"correlation coefficient must lie in [0, 1), got {theta!r}")
    if n < 1:
        raise ValidationError(f"matrix order must be positive, got {n}")
    idx = np.arange(n)
    return theta ** np.abs(idx[:, None] - idx[None, :]).astype(float)


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def eig_sym(m: np.ndarray, return_vectors: bool = False):
    """Eigen-decompose a real symmetric matrix by cyclic Jacobi rotations.

    Returns the eigenvalues in descending order; with return_vectors=True
    also returns the orthonormal eigenvectors as matching columns. Rotations
    preserve the trace, so the eigenvalue sum reproduces trace(m) to
    rounding error.
    """
    a = np.array(m, dtype=float, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.abs(a).max()))):
        raise ValidationError("matrix is not symmetric")
    n = a.shape[0]
    v = np.eye(n) if return_vectors else None

    scale = float(np.linalg.norm(a))
    if n == 1 or scale == 0.0:
        w = np.diag(a).copy()
        order = np.argsort(w)[::-1]
        w = w[order]
        if return_vectors:
            return w, (v[:, order] if v is not None else None)
        return w

    converged = False
    for sweep in range(_MAX_SWEEPS):
        off = _off_norm(a)
        if off <= _OFF_TOL * scale:
            converged = True
            break
        # Threshold strategy: early sweeps only rotate on the larger entries,
        # which avoids churning through negligible rotations.
        thresh = 0.2 * off / n if sweep < 3 else 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= thresh:
                    continue
                tiny = 1e-300
                denom = a[q, q] - a[p, p]
                if abs(apq) < 1e-36 * max(abs(denom), tiny):
                    a[p, q] = a[q, p] = 0.0
                    continue
                # Symmetric Schur rotation annihilating a[p, q].
                tau = denom / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.hypot(1.0, tau)) if tau != 0.0 else 1.0
                c = 1.0 / np.hypot(1.0, t)
                s = t * c

                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                a[p, q] = a[q, p] = 0.0
                if v is not None:
                    vp = v[:, p].copy()
                    vq = v[:, q].copy()
                    v[:, p] = c * vp - s * vq
                    v[:, q] = s * vp + c * vq
    else:
        converged = _off_norm(a) <= _OFF_TOL * scale
    if not converged:
        raise NumericError(
            f"Jacobi eigensolver did not converge within {_MAX_SWEEPS} sweeps"
        )

    w = np.diag(a).copy()
    order = np.argsort(w)[::-1]
    w = w[order]
    if return_vectors:
        assert v is not None
        return w, v[:, order]
    return w


@lru_cache(maxsize=256)
def _spectrum_cached(theta: float, n: int) -> tuple[float, ...]:
    return tuple(eig_sym(exp_correlation(theta, n)))


def exp_corr_spectrum(theta: float, n: int) -> np.ndarray:
    """Eigenvalues of exp_correlation(theta, n), descending, memoized."""
    return np.array(_spectrum_cached(float(theta), int(n)))


def max_eigenvalue_bound(theta: float) -> float:
    """Upper bound (1 + theta) / (1 - theta) on the spectrum, any order."""
    if not (0.0 <= theta < 1.0):
        raise ValidationError(f"correlation coefficient must lie in [0, 1), got {theta!r}")
    return (1.0 + theta) / (1.0 - theta)


def szego_eigen_density(theta: float, x) -> np.ndarray | float:
    """Limiting eigenvalue law of the exponential-correlation family.

    As the order grows, the sorted spectrum converges in distribution to
    lambda(x) = (1 - theta^2) / (1 - 2 theta cos(2 pi x) + theta^2) sampled
    uniformly on x in [0, 1].
    """
    if not (0.0 <= theta < 1.0):
        raise ValidationError(f"correlation coefficient must lie in [0, 1), got {theta!r}")
    x = np.asarray(x, dtype=float)
    val = (1.0 - theta**2) / (1.0 - 2.0 * theta * np.cos(2.0 * np.pi * x) + theta**2)
    return float(val) if val.ndim == 0 else val


def coupling_matrix(lambda_r: np.ndarray, lambda_t: np.ndarray) -> np.ndarray:
    """Rank-one eigenmode power coupling sqrt(lambda_r) sqrt(lambda_t)^T.

    Entry (k, i) is the amplitude weight tying receive eigenmode k to
    transmit eigenmode i; squared entries sum to n_r * n_t whenever both
    spectra are trace-normalized.
    """
    lr = np.asarray(lambda_r, dtype=float)
    lt = np.asarray(lambda_t, dtype=float)
    if lr.ndim != 1 or lt.ndim != 1:
        raise ValidationError("eigenvalue inputs must be vectors")
    if np.any(lr < 0.0) or np.any(lt < 0.0):
        raise ValidationError("eigenvalues must be nonnegative")
    return np.sqrt(lr)[:, None] * np.sqrt(lt)[None, :]
