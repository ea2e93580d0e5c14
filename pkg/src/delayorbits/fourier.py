"""Truncated Fourier series on the circle S^1 = R/Z.

A :class:`PeriodicMap` stores the complex coefficients ``c[j, k]`` of a map
``x: S^1 -> R^n`` for wavenumbers ``k = -K..K`` (mode ``k`` is
``exp(2*pi*i*k*t)``), sampled on the odd grid ``t_i = i/N`` with
``N = 2K + 1``.  Shifts and derivatives act diagonally on the modes, so both
are exact.

Sobolev levels use the diagonal norm

    ||x||_m^2 = sum_{j,k} (1 + (2 pi k)^2)^m |c[j, k]|^2,

which coincides with the L^2 norm at ``m = 0``.

Real coefficient basis
----------------------
Linear algebra elsewhere in the package works on real vectors.  Each
component is stored as ``[Re c_0, Re c_1, Im c_1, ..., Re c_K, Im c_K]``
(length ``N``) and components are stacked, so a map of dimension ``n`` is a
vector of length ``n*N``.  The helpers ``derivative_matrix``,
``shift_matrix``, ``synthesis_matrix`` and ``analysis_matrix`` give the
corresponding ``N x N`` (or ``M x N``) operators for one component.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionMismatch, EvenGridSize, LevelTooHigh, TooFewSamples, ZeroStep

MAX_LEVEL = 6
DEFAULT_K = 32

__all__ = [
    "MAX_LEVEL",
    "DEFAULT_K",
    "PeriodicMap",
    "from_samples",
    "shift",
    "derivative",
    "sobolev_norm",
    "difference_quotient_gap",
    "high_frequency_witness",
    "grid",
    "dealiased_size",
    "derivative_matrix",
    "shift_matrix",
    "synthesis_matrix",
    "analysis_matrix",
]


def grid(N):
    """Equispaced nodes ``i/N`` on [0, 1)."""
    return np.arange(N) / N


def dealiased_size(K):
    """Smallest odd grid size that multiplies two degree-K series without aliasing."""
    M = 3 * K + 1
    return M if M % 2 else M + 1


def _check_level(m):
    if m < 0 or m > MAX_LEVEL or int(m) != m:
        raise LevelTooHigh(f"Sobolev level must be an integer in [0, {MAX_LEVEL}], got {m}")


class PeriodicMap:
    """Immutable truncated Fourier series ``S^1 -> R^n``.

    Parameters
    ----------
    coeffs : array_like, shape (n, 2K+1) or (2K+1,)
        Complex coefficients ordered by wavenumber ``-K..K``.  Conjugate
        symmetry ``c[-k] = conj(c[k])`` is enforced on construction by
        averaging with the mirrored conjugate.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=complex)
        if c.ndim == 1:
            c = c[None, :]
        if c.ndim != 2 or c.shape[1] % 2 == 0:
            raise EvenGridSize(f"coefficient array must have shape (n, 2K+1), got {c.shape}")
        c = 0.5 * (c + np.conj(c[:, ::-1]))
        c.flags.writeable = False
        self._c = c

    # -- construction -------------------------------------------------------

    @classmethod
    def from_samples(cls, values):
        """Interpolate samples on the grid ``i/N`` (N odd, N >= 3)."""
        v = np.asarray(values, dtype=float)
        if v.ndim == 1:
            v = v[None, :]
        N = v.shape[1]
        if N < 3:
            raise TooFewSamples(f"need at least 3 samples, got {N}")
        if N % 2 == 0:
            raise EvenGridSize(f"grid size must be odd, got {N}")
        c = np.fft.fftshift(np.fft.fft(v, axis=1), axes=1) / N
        return cls(c)

    @classmethod
    def from_function(cls, func, K=DEFAULT_K, dim=None):
        """Interpolate ``func(t)`` (vectorized, returning shape (n, N)) on the grid."""
        t = grid(2 * K + 1)
        v = np.asarray(func(t), dtype=float)
        if v.ndim == 1:
            v = v[None, :]
        if dim is not None and v.shape[0] != dim:
            raise DimensionMismatch(f"function returned {v.shape[0]} components, expected {dim}")
        return cls.from_samples(v)

    @classmethod
    def zeros(cls, dim, K=DEFAULT_K):
        return cls(np.zeros((dim, 2 * K + 1), dtype=complex))

    @classmethod
    def constant(cls, value, K=DEFAULT_K):
        v = np.atleast_1d(np.asarray(value, dtype=float))
        c = np.zeros((v.size, 2 * K + 1), dtype=complex)
        c[:, K] = v
        return cls(c)

    @classmethod
    def from_modes(cls, modes, dim=1, K=DEFAULT_K):
        """Build from ``{k: c_k}`` (k >= 0); ``c_k`` is a scalar or length-``dim`` vector."""
        c = np.zeros((dim, 2 * K + 1), dtype=complex)
        for k, val in modes.items():
            k = int(k)
            if abs(k) > K:
                raise ValueError(f"wavenumber {k} exceeds truncation K={K}")
            val = np.broadcast_to(np.asarray(val, dtype=complex), (dim,))
            c[:, K + k] = val
            c[:, K - k] = np.conj(val)
            if k == 0:
                c[:, K] = val.real
        return cls(c)

    # -- basic attributes ---------------------------------------------------

    @property
    def coeffs(self):
        """Read-only complex coefficients, shape (n, 2K+1), wavenumbers -K..K."""
        return self._c

    @property
    def dim(self):
        return self._c.shape[0]

    @property
    def K(self):
        return (self._c.shape[1] - 1) // 2

    @property
    def grid_size(self):
        return self._c.shape[1]

    @property
    def wavenumbers(self):
        K = self.K
        return np.arange(-K, K + 1)

    def mode(self, k):
        """Coefficient vector ``c[:, k]``."""
        return self._c[:, self.K + k].copy()

    def __repr__(self):
        return f"PeriodicMap(dim={self.dim}, K={self.K}, L2={self.sobolev_norm(0):.6g})"

    # -- evaluation ---------------------------------------------------------

    def to_samples(self, M=None):
        """Values on the grid ``i/M`` (default ``M = N``); shape (n, M)."""
        N = self.grid_size
        M = N if M is None else int(M)
        if M < N:
            raise TooFewSamples(f"cannot sample a K={self.K} series on {M} < {N} nodes")
        K = self.K
        buf = np.zeros((self.dim, M), dtype=complex)
        k = np.arange(-K, K + 1)
        buf[:, k % M] = self._c
        return (np.fft.ifft(buf, axis=1) * M).real

    def __call__(self, t):
        """Exact trigonometric evaluation at arbitrary times.

        Scalar ``t`` gives shape (n,), array ``t`` of shape (T,) gives (n, T).
        """
        tt = np.asarray(t, dtype=float)
        scalar = tt.ndim == 0
        tt = np.mod(np.atleast_1d(tt), 1.0)
        K = self.K
        k = np.arange(1, K + 1)
        phase = 2.0 * np.pi * np.outer(k, tt)
        pos = self._c[:, K + 1:]
        out = self._c[:, K].real[:, None] + 2.0 * (pos.real @ np.cos(phase) - pos.imag @ np.sin(phase))
        return out[:, 0] if scalar else out

    # -- spectral operators -------------------------------------------------

    def shift(self, tau):
        """``x(. - tau)``; multiplies mode k by ``exp(-2 pi i k tau)``."""
        k = self.wavenumbers
        return PeriodicMap(self._c * np.exp(-2j * np.pi * k * tau))

    def derivative(self):
        k = self.wavenumbers
        return PeriodicMap(self._c * (2j * np.pi * k))

    def sobolev_norm(self, m=0):
        _check_level(m)
        w = (1.0 + (2.0 * np.pi * self.wavenumbers) ** 2) ** m
        return float(np.sqrt(np.sum(w * np.abs(self._c) ** 2)))

    def resize(self, K):
        """Truncate or zero-pad to a new truncation ``K``."""
        old = self.K
        c = np.zeros((self.dim, 2 * K + 1), dtype=complex)
        m = min(K, old)
        c[:, K - m:K + m + 1] = self._c[:, old - m:old + m + 1]
        return PeriodicMap(c)

    # -- real coefficient basis ---------------------------------------------

    def to_real_vector(self):
        K = self.K
        pos = self._c[:, K + 1:]
        out = np.empty((self.dim, 2 * K + 1))
        out[:, 0] = self._c[:, K].real
        out[:, 1::2] = pos.real
        out[:, 2::2] = pos.imag
        return out.reshape(-1)

    @classmethod
    def from_real_vector(cls, vec, dim, K=DEFAULT_K):
        r = np.asarray(vec, dtype=float).reshape(dim, 2 * K + 1)
        c = np.zeros((dim, 2 * K + 1), dtype=complex)
        pos = r[:, 1::2] + 1j * r[:, 2::2]
        c[:, K] = r[:, 0]
        c[:, K + 1:] = pos
        c[:, :K] = np.conj(pos[:, ::-1])
        return cls(c)

    # -- serialization ------------------------------------------------------

    def to_record(self):
        """Flat record: modes k = 0..K, interleaved (re, im), component-major."""
        K = self.K
        half = self._c[:, K:]
        flat = np.empty((self.dim, K + 1, 2))
        flat[..., 0] = half.real
        flat[..., 1] = half.imag
        return {"dim": self.dim, "K": K, "coefficients": flat.reshape(-1).tolist()}

    @classmethod
    def from_record(cls, record):
        dim, K = int(record["dim"]), int(record["K"])
        flat = np.asarray(record["coefficients"], dtype=float)
        if flat.size != dim * (K + 1) * 2:
            raise DimensionMismatch(
                f"record holds {flat.size} numbers, expected {dim * (K + 1) * 2}")
        half = flat.reshape(dim, K + 1, 2)
        half = half[..., 0] + 1j * half[..., 1]
        c = np.zeros((dim, 2 * K + 1), dtype=complex)
        c[:, K:] = half
        c[:, :K] = np.conj(half[:, :0:-1])
        return cls(c)

    # -- arithmetic ---------------------------------------------------------

    def _other(self, other):
        if not isinstance(other, PeriodicMap):
            return NotImplemented
        if other._c.shape != self._c.shape:
            raise DimensionMismatch(f"shape {self._c.shape} vs {other._c.shape}")
        return other._c

    def __add__(self, other):
        c = self._other(other)
        return NotImplemented if c is NotImplemented else PeriodicMap(self._c + c)

    def __sub__(self, other):
        c = self._other(other)
        return NotImplemented if c is NotImplemented else PeriodicMap(self._c - c)

    def __mul__(self, alpha):
        if isinstance(alpha, PeriodicMap):
            return NotImplemented
        return PeriodicMap(self._c * float(alpha))

    __rmul__ = __mul__

    def __truediv__(self, alpha):
        return PeriodicMap(self._c / float(alpha))

    def __neg__(self):
        return PeriodicMap(-self._c)

    def __eq__(self, other):
        return isinstance(other, PeriodicMap) and np.array_equal(self._c, other._c)

    __hash__ = None


# -- module-level operations ------------------------------------------------

def from_samples(values):
    return PeriodicMap.from_samples(values)


def shift(x, tau):
    return x.shift(tau)


def derivative(x):
    return x.derivative()


def sobolev_norm(x, m=0):
    return x.sobolev_norm(m)


def difference_quotient_gap(x, T):
    """L^2 distance between the difference quotient of the shift and ``-d/dt x``.

    Returns ``||(shift(x, T) - x)/T + x'||_0``, which tends to zero linearly
    in ``T`` for a truncated series.  Evaluated mode-by-mode with the
    cancellation-free form ``exp(-i a) - 1 = -2i sin(a/2) exp(-i a/2)``.
    """
    if T == 0:
        raise ZeroStep("difference quotient needs a nonzero step")
    k = x.wavenumbers
    half = np.pi * k * T
    quotient = -2j * np.sin(half) * np.exp(-1j * half) / T
    gap = (quotient + 2j * np.pi * k) * x.coeffs
    return float(np.sqrt(np.sum(np.abs(gap) ** 2)))


def high_frequency_witness(T, K=DEFAULT_K):
    """Unit-L^2 cosine mode whose shift by ``T`` moves it by at least 1.

    The wavenumber is ``ceil(1/(4T))``, so only steps with
    ``T >= 1/(4K)`` are resolved by a truncation ``K``.

    Returns
    -------
    x : PeriodicMap
    gap : float
        ``||shift(x, T) - x||_0``.
    """
    if T <= 0:
        raise ZeroStep("witness needs a positive step")
    k = math.ceil(1.0 / (4.0 * T) - 1e-12)
    if k > K:
        raise ValueError(f"T={T} needs wavenumber {k} > K={K}")
    x = PeriodicMap.from_modes({k: 1.0 / math.sqrt(2.0)}, dim=1, K=K)
    return x, (x.shift(T) - x).sobolev_norm(0)


# -- real-basis operator matrices (one component) --------------------------

def derivative_matrix(K):
    N = 2 * K + 1
    D = np.zeros((N, N))
    for k in range(1, K + 1):
        i = 2 * k - 1
        w = 2.0 * np.pi * k
        D[i, i + 1] = -w
        D[i + 1, i] = w
    return D


def shift_matrix(K, tau):
    N = 2 * K + 1
    S = np.zeros((N, N))
    S[0, 0] = 1.0
    for k in range(1, K + 1):
        i = 2 * k - 1
        c, s = math.cos(2.0 * np.pi * k * tau), math.sin(2.0 * np.pi * k * tau)
        S[i, i], S[i, i + 1] = c, s
        S[i + 1, i], S[i + 1, i + 1] = -s, c
    return S


def synthesis_matrix(K, t):
    """Map real coefficients to values at the nodes ``t``; shape (len(t), N)."""
    t = np.asarray(t, dtype=float)
    k = np.arange(1, K + 1)
    phase = 2.0 * np.pi * np.outer(t, k)
    E = np.empty((t.size, 2 * K + 1))
    E[:, 0] = 1.0
    E[:, 1::2] = 2.0 * np.cos(phase)
    E[:, 2::2] = -2.0 * np.sin(phase)
    return E


def analysis_matrix(K, M):
    """Project samples on the grid ``i/M`` onto real coefficients up to ``K``."""
    t = grid(M)
    k = np.arange(1, K + 1)
    phase = 2.0 * np.pi * np.outer(k, t)
    A = np.empty((2 * K + 1, M))
    A[0] = 1.0 / M
    A[1::2] = np.cos(phase) / M
    A[2::2] = -np.sin(phase) / M
    return A
