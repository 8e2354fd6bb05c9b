"""Boundary functions on the reference circle/sphere.

For N = 2 a function is stored in the plain real trigonometric basis

    phi(theta) = a_0 + sum_k a_k cos(k theta) + b_k sin(k theta),

so ``cos(2 theta)`` has coefficient exactly 1 on mode (2, cos).  The
L2(S^1)-orthonormal basis {1/sqrt(2 pi), cos/sqrt(pi), sin/sqrt(pi)} used for
spherical harmonics differs only by the per-mode factors returned by
:meth:`BoundaryFunction.l2_coefficients`; every multiplier in the package is
diagonal, so it does not care which of the two scalings is used.

For N >= 3 only the coefficient map is available (no sampling); the entry for
mode k is an array of length d_k (the dimension of the degree-k harmonics).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Mapping

import numpy as np

from .errors import InvalidInputError


def harmonic_dimension(N: int, k: int) -> int:
    """Multiplicity d_k of the eigenvalue k(N+k-2) on S^{N-1}."""
    if k == 0:
        return 1
    if k == 1:
        return N
    return comb(N + k - 1, k) - comb(N + k - 3, k - 2)


def nodes(M: int) -> np.ndarray:
    """Equispaced collocation angles 2 pi j / M."""
    return 2.0 * np.pi * np.arange(M) / M


@dataclass(frozen=True)
class Discretization:
    """Node count per curve and Fourier cutoff.

    ``inner_M`` is the node count for an inner curve with corners (graded
    quadrature); it defaults to ``M``.  ``grading`` is the polynomial order of
    the corner grading map.
    """

    M: int = 256
    K: int = 64
    quad_tol: float = 1e-10
    inner_M: int | None = None
    grading: int = 8

    def __post_init__(self):
        if self.M % 2 or self.M < 64:
            raise InvalidInputError(f"M must be even and >= 64, got {self.M}")
        if self.K < 1 or 4 * self.K > self.M:
            raise InvalidInputError(f"need 1 <= K <= M/4, got K={self.K}, M={self.M}")
        if self.quad_tol <= 0:
            raise InvalidInputError("quad_tol must be positive")
        if self.inner_M is not None and self.inner_M < 32:
            raise InvalidInputError("inner_M must be >= 32")
        if self.grading < 2:
            raise InvalidInputError("grading order must be >= 2")

    @property
    def nodes(self) -> np.ndarray:
        return nodes(self.M)


@dataclass(frozen=True)
class BoundaryFunction:
    dim: int = 2
    coeffs: Mapping[int, np.ndarray] = field(default_factory=dict)
    samples: np.ndarray | None = None

    def __post_init__(self):
        if self.dim < 2:
            raise InvalidInputError("dimension must be >= 2")
        clean = {}
        for k, c in self.coeffs.items():
            k = int(k)
            if k < 0:
                raise InvalidInputError("mode indices must be non-negative")
            c = np.atleast_1d(np.asarray(c, dtype=float)).copy()
            want = 1 if (self.dim == 2 and k == 0) else (2 if self.dim == 2 else harmonic_dimension(self.dim, k))
            if c.shape != (want,):
                raise InvalidInputError(f"mode {k} needs {want} coefficients, got shape {c.shape}")
            if not np.all(np.isfinite(c)):
                raise InvalidInputError(f"non-finite coefficient on mode {k}")
            c.flags.writeable = False
            clean[k] = c
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))
        if self.samples is not None:
            if self.dim != 2:
                raise InvalidInputError("samples are only supported for N = 2")
            s = np.asarray(self.samples, dtype=float).copy()
            s.flags.writeable = False
            object.__setattr__(self, "samples", s)

    # construction -----------------------------------------------------

    @classmethod
    def from_trig(cls, a, b=None, samples=None) -> "BoundaryFunction":
        """Build an N = 2 function from cosine (``a``) and sine (``b``) arrays.

        ``a[0]`` is the mean; ``b[0]`` is ignored.
        """
        a = np.asarray(a, dtype=float)
        b = np.zeros_like(a) if b is None else np.asarray(b, dtype=float)
        if a.shape != b.shape or a.ndim != 1:
            raise InvalidInputError("cosine and sine arrays must be 1-D and equally long")
        coeffs = {0: np.array([a[0]])}
        for k in range(1, a.size):
            coeffs[k] = np.array([a[k], b[k]])
        return cls(2, coeffs, samples)

    @classmethod
    def mode(cls, k: int, amplitude: float = 1.0, parity: str = "cos") -> "BoundaryFunction":
        a = np.zeros(k + 1)
        b = np.zeros(k + 1)
        if parity == "cos":
            a[k] = amplitude
        elif parity == "sin":
            if k == 0:
                raise InvalidInputError("sin(0 theta) is not a basis function")
            b[k] = amplitude
        else:
            raise InvalidInputError(f"parity must be 'cos' or 'sin', got {parity!r}")
        return cls.from_trig(a, b)

    @classmethod
    def zero(cls, dim: int = 2) -> "BoundaryFunction":
        return cls(dim, {})

    # views ------------------------------------------------------------

    @property
    def K(self) -> int:
        return max(self.coeffs, default=0)

    def coefficient(self, k: int) -> np.ndarray:
        if k in self.coeffs:
            return self.coeffs[k]
        n = 1 if (self.dim == 2 and k == 0) else (2 if self.dim == 2 else harmonic_dimension(self.dim, k))
        return np.zeros(n)

    def trig(self, K: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Cosine and sine coefficient arrays of length K + 1 (N = 2 only)."""
        self._require_2d()
        K = self.K if K is None else K
        a = np.zeros(K + 1)
        b = np.zeros(K + 1)
        for k, c in self.coeffs.items():
            if k > K:
                continue
            a[k] = c[0]
            if k:
                b[k] = c[1]
        return a, b

    def l2_coefficients(self, K: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Coefficients in the L2(S^1)-orthonormal basis."""
        a, b = self.trig(K)
        scale = np.full(a.size, np.sqrt(np.pi))
        scale[0] = np.sqrt(2.0 * np.pi)
        return a * scale, b * scale

    # evaluation -------------------------------------------------------

    def evaluate(self, theta, derivative: int = 0) -> np.ndarray:
        """Value (or d-th theta-derivative) at arbitrary angles."""
        self._require_2d()
        theta = np.asarray(theta, dtype=float)
        a, b = self.trig()
        out = np.zeros_like(theta)
        if derivative == 0:
            out = out + a[0]
        for k in range(1, a.size):
            if a[k] == 0.0 and b[k] == 0.0:
                continue
            c, s = np.cos(k * theta), np.sin(k * theta)
            # d/dtheta cycles (cos, sin) -> (-sin, cos)
            val = [a[k] * c + b[k] * s, -a[k] * s + b[k] * c, -(a[k] * c + b[k] * s), a[k] * s - b[k] * c]
            out = out + k**derivative * val[derivative % 4]
        return out

    def synthesize(self, M: int) -> np.ndarray:
        return self.evaluate(nodes(M))

    # algebra ----------------------------------------------------------

    def _combine(self, other: "BoundaryFunction", alpha: float, beta: float) -> "BoundaryFunction":
        if self.dim != other.dim:
            raise InvalidInputError("dimension mismatch")
        coeffs = {}
        for k in set(self.coeffs) | set(other.coeffs):
            coeffs[k] = alpha * self.coefficient(k) + beta * other.coefficient(k)
        samples = None
        if self.samples is not None and other.samples is not None and self.samples.shape == other.samples.shape:
            samples = alpha * self.samples + beta * other.samples
        return BoundaryFunction(self.dim, coeffs, samples)

    def __add__(self, other):
        return self._combine(other, 1.0, 1.0)

    def __sub__(self, other):
        return self._combine(other, 1.0, -1.0)

    def __mul__(self, scalar: float):
        scalar = float(scalar)
        samples = None if self.samples is None else scalar * self.samples
        return BoundaryFunction(self.dim, {k: scalar * c for k, c in self.coeffs.items()}, samples)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def map_modes(self, fn) -> "BoundaryFunction":
        """Apply a mode-wise multiplier ``fn(k) -> float`` (drops samples)."""
        return BoundaryFunction(self.dim, {k: fn(k) * c for k, c in self.coeffs.items()})

    def truncate(self, K: int) -> "BoundaryFunction":
        return BoundaryFunction(self.dim, {k: c for k, c in self.coeffs.items() if k <= K})

    def sup_norm(self, M: int = 1024) -> float:
        """Sup norm on a fine grid (N = 2) or the l1 coefficient bound otherwise."""
        if self.dim == 2:
            return float(np.max(np.abs(self.synthesize(M)), initial=0.0))
        return float(sum(np.abs(c).sum() for c in self.coeffs.values()))

    def _require_2d(self):
        if self.dim != 2:
            raise InvalidInputError("sampled/trigonometric views need N = 2")


def analyze(samples, K: int | None = None) -> BoundaryFunction:
    """Real Fourier coefficients of equispaced samples on [0, 2 pi).

    Exact inverse of :meth:`BoundaryFunction.synthesize` for band-limited
    data with K < M/2.  ``K`` defaults to M/2 - 1 (Nyquist dropped).
    """
    s = np.asarray(samples, dtype=float)
    if s.ndim != 1:
        raise InvalidInputError("samples must be one-dimensional")
    M = s.size
    if M % 2 or M == 0:
        raise InvalidInputError(f"sample count must be even, got {M}")
    if not np.all(np.isfinite(s)):
        raise InvalidInputError("non-finite sample")
    K = M // 2 - 1 if K is None else K
    if K >= M // 2:
        raise InvalidInputError(f"K={K} must be below M/2={M // 2}")
    c = np.fft.rfft(s) / M
    a = 2.0 * c.real[: K + 1]
    b = -2.0 * c.imag[: K + 1]
    a[0] = c[0].real
    b[0] = 0.0
    return BoundaryFunction.from_trig(a, b, samples=s)


def project_zero_mean(phi: BoundaryFunction) -> BoundaryFunction:
    """Remove the k = 0 mode; every other coefficient is untouched."""
    coeffs = {k: c for k, c in phi.coeffs.items() if k != 0}
    samples = None
    if phi.samples is not None:
        samples = phi.samples - phi.coefficient(0)[0]
    return BoundaryFunction(phi.dim, coeffs, samples)


def spectral_derivative(values: np.ndarray, order: int = 1) -> np.ndarray:
    """Periodic derivative d^order/dtheta^order of equispaced samples."""
    M = values.size
    k = np.fft.rfftfreq(M, 1.0 / M)
    spec = np.fft.rfft(values) * (1j * k) ** order
    if M % 2 == 0 and order % 2 == 1:
        spec[-1] = 0.0
    return np.fft.irfft(spec, n=M)
