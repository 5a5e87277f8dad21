"""Seeded randomness: reproducible substreams and the model's two draws.

Every stochastic quantity in the package flows through a RandomStream so
that a (seed, stream_id) pair fully determines the draw sequence. Stream
ids are mapped to disjoint counter blocks of a Philox generator, which is
what makes per-trial parallelism reproducible: trial i always consumes
stream i regardless of which worker runs it.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError

_SQRT_HALF = np.sqrt(0.5)
#: Counter stride between substreams; each stream owns 2^128 Philox blocks.
_STREAM_STRIDE = 1 << 128


class RandomStream:
    """A named, reproducible substream of the experiment-wide seed."""

    def __init__(self, seed: int, stream_id: int = 0):
        if seed < 0 or stream_id < 0:
            raise ValidationError("seed and stream_id must be nonnegative integers")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self._gen: np.random.Generator | None = None

    @property
    def gen(self) -> np.random.Generator:
        if self._gen is None:
            bitgen = np.random.Philox(
                key=self.seed, counter=self.stream_id * _STREAM_STRIDE
            )
            self._gen = np.random.Generator(bitgen)
        return self._gen

    def __repr__(self) -> str:  # pragma: no cover
        return f"RandomStream(seed={self.seed}, stream_id={self.stream_id})"


def sample_cscg(stream: RandomStream, rows: int, cols: int) -> np.ndarray:
    """Circularly-symmetric complex Gaussian matrix, unit entry variance.

    Real and imaginary parts are independent N(0, 1/2), so E|h|^2 = 1.
    """
    if rows < 1 or cols < 1:
        raise ValidationError(f"matrix shape must be positive, got {(rows, cols)}")
    re = stream.gen.standard_normal((rows, cols))
    im = stream.gen.standard_normal((rows, cols))
    return _SQRT_HALF * (re + 1j * im)


def _standard_gamma_mt(gen: np.random.Generator, shape: np.ndarray) -> np.ndarray:
    """Vectorized Marsaglia-Tsang sampler for Gamma(shape, 1), shape >= 1.

    Squeeze-then-log rejection: d = shape - 1/3, c = 1/sqrt(9d); propose
    x ~ N(0,1), v = (1 + c x)^3 and accept d*v when the squeeze
    u < 1 - 0.0331 x^4 or the exact test log u < x^2/2 + d(1 - v + log v)
    passes.
    """
    out = np.empty(shape.shape, dtype=float)
    d = shape - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    pending = np.ones(shape.shape, dtype=bool)
    while True:
        idx = np.flatnonzero(pending)
        if idx.size == 0:
            break
        x = gen.standard_normal(idx.size)
        u = gen.random(idx.size)
        v = (1.0 + c[idx] * x) ** 3
        positive = v > 0.0
        squeeze = u < 1.0 - 0.0331 * x**4
        with np.errstate(divide="ignore", invalid="ignore"):
            exact = np.log(u) < 0.5 * x**2 + d[idx] * (1.0 - v + np.log(v))
        accept = positive & (squeeze | exact)
        take = idx[accept]
        out[take] = d[take] * v[accept]
        pending[take] = False
    return out


def sample_shadowing(stream: RandomStream, alpha, omega: float, size=None):
    """Gamma-distributed shadowing with mean omega and variance omega^2/alpha.

    `alpha` may be a scalar or a vector of per-link shapes; `size` forces the
    output shape (broadcasting alpha). Shapes below one use the boost
    identity G(a) = G(a+1) * U^(1/a). Returns a float for scalar input.
    """
    a = np.asarray(alpha, dtype=float)
    scalar_out = size is None and a.ndim == 0
    if size is not None:
        a = np.broadcast_to(a, size).astype(float, copy=True)
    a = np.atleast_1d(a)
    if not np.all(a > 0.5):
        raise ValidationError("every shadowing shape alpha must exceed 0.5")
    if not (omega > 0.0 and np.isfinite(omega)):
        raise ValidationError(f"omega must be positive and finite, got {omega!r}")

    boosted = a < 1.0
    g = _standard_gamma_mt(stream.gen, np.where(boosted, a + 1.0, a))
    if np.any(boosted):
        u = stream.gen.random(a.shape)
        with np.errstate(invalid="ignore"):
            g = np.where(boosted, g * u ** (1.0 / a), g)
    draws = g * (omega / a)
    return float(draws[0]) if scalar_out else draws
