"""Closed-form quantities at the concentric (trivial) configuration.

Everything here is dimension-generic (integer N >= 2).  Wherever the
combination (2-N)/(R^(2-N)-1) appears it is replaced by 1/log R at N = 2,
which is its limit as N -> 2.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import log

import numpy as np

from .errors import DegenerateDenominatorError, InvalidInputError, ResonanceError
from .spectral import BoundaryFunction, project_zero_mean


class ProblemKind(str, enum.Enum):
    BERNOULLI = "bernoulli"
    TWO_PHASE = "two_phase"


@dataclass(frozen=True)
class ProblemSpec:
    kind: ProblemKind = ProblemKind.BERNOULLI
    N: int = 2
    R: float = 0.5
    sigma_c: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ProblemKind(self.kind))
        if int(self.N) != self.N or self.N < 2:
            raise InvalidInputError(f"N must be an integer >= 2, got {self.N}")
        if not 0.0 < self.R < 1.0:
            raise InvalidInputError(f"R must lie in (0, 1), got {self.R}")
        if self.kind is ProblemKind.TWO_PHASE:
            if self.sigma_c is None or not self.sigma_c > 0 or self.sigma_c == 1.0:
                raise InvalidInputError(f"two-phase problems need sigma_c > 0, sigma_c != 1; got {self.sigma_c}")

    @classmethod
    def bernoulli(cls, R: float = 0.5, N: int = 2) -> "ProblemSpec":
        return cls(ProblemKind.BERNOULLI, N, R)

    @classmethod
    def two_phase(cls, sigma_c: float, R: float = 0.5, N: int = 2) -> "ProblemSpec":
        return cls(ProblemKind.TWO_PHASE, N, R, sigma_c)

    @property
    def is_two_phase(self) -> bool:
        return self.kind is ProblemKind.TWO_PHASE


def _require(spec: ProblemSpec, kind: ProblemKind):
    if spec.kind is not kind:
        raise InvalidInputError(f"expected a {kind.value} problem, got {spec.kind.value}")


def flux_constant(N: int, R: float) -> float:
    """(2-N)/(R^(2-N)-1), or 1/log R when N = 2."""
    if N == 2:
        return 1.0 / log(R)
    return (2.0 - N) / (R ** (2.0 - N) - 1.0)


# ---------------------------------------------------------------- Bernoulli


def radial_state(r, spec: ProblemSpec):
    """Trivial Bernoulli state u(r): 1 on r = R, 0 on r = 1."""
    _require(spec, ProblemKind.BERNOULLI)
    N, R = spec.N, spec.R
    r = np.asarray(r, dtype=float)
    eps = 1e-14
    if np.any(r < R - eps) or np.any(r > 1.0 + eps):
        raise InvalidInputError(f"r must lie in [R, 1] = [{R}, 1]")
    if N == 2:
        out = np.log(r) / log(R)
    else:
        out = (r ** (2.0 - N) - 1.0) / (R ** (2.0 - N) - 1.0)
    return out if out.ndim else float(out)


def boundary_derivatives(spec: ProblemSpec) -> tuple[float, float]:
    """(d_n u, d_nn u) of the trivial Bernoulli state on the unit sphere."""
    _require(spec, ProblemKind.BERNOULLI)
    c = flux_constant(spec.N, spec.R)
    return c, (1.0 - spec.N) * c


def linearization_coeffs_bernoulli(k: int, spec: ProblemSpec) -> tuple[float, float, float, float]:
    """(A_k^-, B_k^-, A_k^+, B_k^+): radial profiles A r^(2-N-k) + B r^k of the
    shape derivative for a unit inner (-) or outer (+) mode k."""
    _require(spec, ProblemKind.BERNOULLI)
    _check_k(k)
    N, R = spec.N, spec.R
    c = flux_constant(N, R)
    a_minus = c * (-(R ** (2 - N))) / (R ** (2 - N - k) - R**k)
    p = R ** (2 - N - 2 * k)
    a_plus = c / (p - 1.0)
    b_plus = -a_plus * p
    return a_minus, -a_minus, a_plus, b_plus


def multipliers_bernoulli(k: int, spec: ProblemSpec) -> tuple[float, float]:
    """(m_f, m_g): mode-k symbols of d_f Psi(0,0) and d_g Psi(0,0) from the closed-form
    expansion (m_g is beta_k)."""
    _require(spec, ProblemKind.BERNOULLI)
    _check_k(k)
    N, R = spec.N, spec.R
    c = flux_constant(N, R)
    den = R ** (2 - N - k) - R**k
    m_f = c * R ** (2 - N) * (N - 2 + 2 * k) / den
    m_g = c * ((1 - k) * R**k + (1 - N - k) * R ** (2 - N - k)) / den
    return m_f, m_g


def beta(k: int, spec: ProblemSpec) -> float:
    return multipliers_bernoulli(k, spec)[1]


def inner_multiplier_bernoulli_exact(k: int, spec: ProblemSpec) -> float:
    """Mode-k symbol of d_f Psi(0,0) with the inner Dirichlet datum taken as
    -d_r u(R) a(theta).

    The plain closed form evaluates the flux of the trivial state at r = 1
    instead of r = R; the two differ by the factor 1/R.  This version is the
    one the boundary-integral solver reproduces (and the one consistent with
    rigid translations at k = 1, where g = a exactly).
    """
    return multipliers_bernoulli(k, spec)[0] / spec.R


def asymptotic_coefficient_bernoulli(k: int, spec: ProblemSpec) -> float:
    """Mode-k coefficient of the first-order expansion g(f) ~ sum c_k alpha_k^-."""
    _require(spec, ProblemKind.BERNOULLI)
    _check_k(k)
    N, R = spec.N, spec.R
    return (2 - N - 2 * k) * R ** (2 - N) / ((1 - k) * R**k + (1 - N - k) * R ** (2 - N - k))


# ---------------------------------------------------------------- two-phase


def two_phase_denominator(k: int, spec: ProblemSpec) -> float:
    _require(spec, ProblemKind.TWO_PHASE)
    N, R, s = spec.N, spec.R, spec.sigma_c
    return N * (N - 2 + k + k * s) * R ** (2 - N - 2 * k) + k * N * (1 - s)


def multipliers_two_phase(k: int, spec: ProblemSpec, tol: float = 1e-300) -> tuple[float, float, float]:
    """(m_f, m_g, F) for the two-phase problem."""
    _require(spec, ProblemKind.TWO_PHASE)
    _check_k(k)
    N, R, s = spec.N, spec.R, spec.sigma_c
    F = two_phase_denominator(k, spec)
    if abs(F) <= tol:
        raise DegenerateDenominatorError(f"F({k}) = {F!r} vanishes")
    m_f = (2 - N - 2 * k) / F * (s - 1) * k * R ** (1 - k)
    m_g = ((N + k - 1) * (s - 1) * k + (N - 2 + k + k * s) * (k - 1) * R ** (2 - N - 2 * k)) / F
    return m_f, m_g, F


def asymptotic_coefficient_two_phase(k: int, spec: ProblemSpec) -> float:
    _require(spec, ProblemKind.TWO_PHASE)
    _check_k(k)
    N, R, s = spec.N, spec.R, spec.sigma_c
    num = (N + 2 * k - 2) * (s - 1) * k * R ** (1 - k)
    den = (N + k - 1) * (s - 1) * k + (N - 2 + k + k * s) * (k - 1) * R ** (2 - N - 2 * k)
    if den == 0.0:
        raise ResonanceError(k, s, s, 0.0)
    return num / den


def sigma_singular(k: int, N: int, R: float) -> float:
    """Resonant conductivity s(k); s(1) = 1 for every (N, R)."""
    _check_k(k)
    p = R ** (2 - N - 2 * k)
    a = k * (N + k - 1)
    return (a - (N + k - 2) * (k - 1) * p) / (a + k * (k - 1) * p)


def nearest_resonance(sigma_c: float, N: int, R: float, K: int) -> tuple[int, float, float] | None:
    """(k, s(k), |sigma_c - s(k)|) for the closest positive s(k), k <= K."""
    best = None
    for k in range(1, K + 1):
        s = sigma_singular(k, N, R)
        if s <= 0:
            continue
        d = abs(sigma_c - s)
        if best is None or d < best[2]:
            best = (k, s, d)
    return best


def is_singular(sigma_c: float, N: int, R: float, K: int, tol: float = 1e-9) -> bool:
    hit = nearest_resonance(sigma_c, N, R, K)
    return hit is not None and hit[2] < tol


def check_resonance(spec: ProblemSpec, K: int, tol: float = 1e-9):
    """Raise :class:`ResonanceError` if sigma_c is within ``tol`` of some s(k > 1)."""
    if not spec.is_two_phase:
        return
    hit = nearest_resonance(spec.sigma_c, spec.N, spec.R, K)
    if hit is not None and hit[2] < tol:
        raise ResonanceError(hit[0], spec.sigma_c, hit[1], tol)


def trivial_two_phase_radial(r, spec: ProblemSpec, derivative: int = 0):
    """Radial solution of -div(sigma grad u) = 1 on concentric balls, u(1) = 0.

    Outer phase: (1 - r^2)/(2N).  Inner phase: -r^2/(2N sigma_c) + const, the
    constant fixed by continuity at r = R.  The flux sigma u_r = -r/N is
    continuous automatically.
    """
    _require(spec, ProblemKind.TWO_PHASE)
    N, R, s = spec.N, spec.R, spec.sigma_c
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(r > 1.0 + 1e-14):
        raise InvalidInputError("r must lie in [0, 1]")
    inner = r < R
    if derivative == 0:
        out = np.where(inner, -(r**2) / (2 * N * s) + (1 - R**2) / (2 * N) + R**2 / (2 * N * s), (1 - r**2) / (2 * N))
    elif derivative == 1:
        out = np.where(inner, -r / (N * s), -r / N)
    else:
        raise InvalidInputError("derivative must be 0 or 1")
    return out if out.ndim else float(out)


# ---------------------------------------------------------------- tables


def multipliers(k: int, spec: ProblemSpec) -> tuple[float, float]:
    if spec.is_two_phase:
        m_f, m_g, _ = multipliers_two_phase(k, spec)
        return m_f, m_g
    return multipliers_bernoulli(k, spec)


def outer_multiplier(k: int, spec: ProblemSpec) -> float:
    return multipliers(k, spec)[1]


def asymptotic_coefficient(k: int, spec: ProblemSpec) -> float:
    if spec.is_two_phase:
        return asymptotic_coefficient_two_phase(k, spec)
    return asymptotic_coefficient_bernoulli(k, spec)


@dataclass(frozen=True)
class MultiplierTable:
    problem: ProblemSpec
    k: np.ndarray
    m_f: np.ndarray
    m_g: np.ndarray
    F: np.ndarray | None = None
    s: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @classmethod
    def build(cls, spec: ProblemSpec, K: int) -> "MultiplierTable":
        ks = np.arange(1, K + 1)
        if spec.is_two_phase:
            rows = np.array([multipliers_two_phase(int(k), spec) for k in ks])
            s = np.array([sigma_singular(int(k), spec.N, spec.R) for k in ks])
            return cls(spec, ks, rows[:, 0], rows[:, 1], rows[:, 2], s)
        rows = np.array([multipliers_bernoulli(int(k), spec) for k in ks])
        return cls(spec, ks, rows[:, 0], rows[:, 1])

    @property
    def condition(self) -> float:
        a = np.abs(self.m_g)
        return float(a.max() / a.min())

    def columns(self) -> list[str]:
        return ["k", "m_f", "m_g", "F", "s_k"] if self.problem.is_two_phase else ["k", "m_f", "m_g"]

    def rows(self):
        for i, k in enumerate(self.k):
            row = [int(k), float(self.m_f[i]), float(self.m_g[i])]
            if self.problem.is_two_phase:
                row += [float(self.F[i]), float(self.s[i])]
            yield row


def first_order_g(f: BoundaryFunction, spec: ProblemSpec, K: int | None = None, tol: float = 1e-9) -> BoundaryFunction:
    """Leading-order free boundary g1 for the inner normal displacement ``f``.

    Mode k of f (k >= 1) is multiplied by the asymptotic coefficient; the
    mean of f is dropped.
    """
    Kf = f.K if K is None else K
    check_resonance(spec, max(Kf, 1), tol)
    f0 = project_zero_mean(f).truncate(Kf)
    if f0.dim != spec.N:
        raise InvalidInputError("perturbation dimension does not match the problem")
    return f0.map_modes(lambda k: asymptotic_coefficient(k, spec))


def first_order_g_exact(f: BoundaryFunction, spec: ProblemSpec, K: int | None = None, tol: float = 1e-9) -> BoundaryFunction:
    """Like :func:`first_order_g` with the corrected inner symbol for Bernoulli
    (see :func:`inner_multiplier_bernoulli_exact`); identical for two-phase."""
    if spec.is_two_phase:
        return first_order_g(f, spec, K, tol)
    Kf = f.K if K is None else K
    f0 = project_zero_mean(f).truncate(Kf)
    return f0.map_modes(lambda k: asymptotic_coefficient_bernoulli(k, spec) / spec.R)


def _check_k(k):
    if int(k) != k or k < 1:
        raise InvalidInputError(f"mode index must be an integer >= 1, got {k}")
