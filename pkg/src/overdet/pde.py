"""Boundary-integral solvers for the two state problems on perturbed annuli.

Nystrom discretization of second-kind equations with the double-layer kernel

    k(x, y) = (1/2pi) (y - x).n_y / |y - x|^2

(+1 inside a closed curve with outward n) on periodic trapezoidal grids, graded
near declared corners.  The normal derivative of a double layer on its own
curve is evaluated as Re(n Phi') where Phi is the Cauchy integral whose real
part is the double layer; Phi' is the Cauchy integral of dmu/dz, computed with
singularity subtraction so the quadrature stays smooth.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import IllConditionedError, InvalidInputError
from .formulas import ProblemSpec
from .geometry import Curve, TentNotch, check_annulus, discretize, profile_corners
from .spectral import BoundaryFunction, Discretization, analyze, project_zero_mean, spectral_derivative

COND_LIMIT = 1e12
TWO_PI = 2.0 * np.pi


class HopfViolationWarning(UserWarning):
    """Outer normal derivative is not strictly negative somewhere."""


@dataclass(frozen=True)
class DomainPair:
    """Inner curve R + a(theta) (possibly with corners), outer curve 1 + g(theta)."""

    R: float
    inner: BoundaryFunction | TentNotch = field(default_factory=BoundaryFunction.zero)
    outer: BoundaryFunction = field(default_factory=BoundaryFunction.zero)

    def __post_init__(self):
        if not 0 < self.R < 1:
            raise InvalidInputError(f"R must lie in (0, 1), got {self.R}")
        if abs(self.outer.coefficient(0)[0]) > 1e-14:
            raise InvalidInputError("outer perturbation g must have zero mean")
        check_annulus(self.R, self.inner, self.outer)

    @property
    def inner_corners(self) -> tuple[float, ...]:
        return profile_corners(self.inner)


@dataclass(frozen=True)
class BoundaryField:
    """Outer-boundary output of a state solve, pulled back to theta nodes."""

    nodes: np.ndarray
    dn_values: np.ndarray
    c: float
    psi: BoundaryFunction
    est_error: float
    condition: float = float("nan")

    @property
    def hopf_ok(self) -> bool:
        return bool(np.all(self.dn_values < 0))


# ------------------------------------------------------------------ kernels


def _diff(targets: np.ndarray, src: Curve) -> np.ndarray:
    return targets[:, None] - src.z[None, :]


def dlp_matrix(targets: np.ndarray, src: Curve) -> np.ndarray:
    """Double-layer values at off-curve targets."""
    r = _diff(targets, src)  # x - y
    rn = np.real(r * np.conj(src.normal)[None, :])
    return -rn / np.abs(r) ** 2 * src.w[None, :] / TWO_PI


def dlp_self_matrix(src: Curve) -> np.ndarray:
    """Principal-value double layer K on the source curve itself."""
    r = _diff(src.z, src)
    np.fill_diagonal(r, 1.0)
    rn = np.real(r * np.conj(src.normal)[None, :])
    K = -rn / np.abs(r) ** 2
    np.fill_diagonal(K, src.curvature_term())
    return K * src.w[None, :] / TWO_PI


def adjoint_dlp_self_matrix(src: Curve) -> np.ndarray:
    """K' = normal derivative (w.r.t. the curve's normal) of the single layer, PV."""
    r = _diff(src.z, src)
    np.fill_diagonal(r, 1.0)
    rn = np.real(r * np.conj(src.normal)[:, None])
    K = -rn / np.abs(r) ** 2
    np.fill_diagonal(K, -src.curvature_term())
    return K * src.w[None, :] / TWO_PI


def slp_matrix(targets: np.ndarray, src: Curve) -> np.ndarray:
    r = _diff(targets, src)
    return -np.log(np.abs(r)) * src.w[None, :] / TWO_PI


def slp_normal_matrix(targets: np.ndarray, tnormal: np.ndarray, src: Curve) -> np.ndarray:
    r = _diff(targets, src)
    rn = np.real(r * np.conj(tnormal)[:, None])
    return -rn / np.abs(r) ** 2 * src.w[None, :] / TWO_PI


def dlp_normal_matrix(targets: np.ndarray, tnormal: np.ndarray, src: Curve) -> np.ndarray:
    """Target-normal derivative of the double layer at off-curve targets."""
    r = _diff(targets, src)
    r2 = np.abs(r) ** 2
    ny = src.normal[None, :]
    nx = tnormal[:, None]
    rn = np.real(r * np.conj(ny))
    rx = np.real(r * np.conj(nx))
    nn = np.real(ny * np.conj(nx))
    return -(nn / r2 - 2.0 * rn * rx / r2**2) * src.w[None, :] / TWO_PI


def cauchy_normal_derivative(src: Curve, nu: np.ndarray, dnu: np.ndarray) -> np.ndarray:
    """Re(n Phi') on a counterclockwise curve with outward normal, where
    Phi' is the interior limit of the Cauchy integral of ``nu`` = dmu/dz and
    ``dnu`` = d nu/d theta."""
    dz = src.z[None, :] - src.z[:, None]  # zeta_j - z_i
    np.fill_diagonal(dz, 1.0)
    terms = (nu[None, :] - nu[:, None]) * (src.dz * src.dtheta)[None, :] / dz
    np.fill_diagonal(terms, dnu * src.dtheta)
    phi_p = nu + terms.sum(axis=1) / (TWO_PI * 1j)
    return np.real(src.normal * phi_p)


def dlp_hypersingular_smooth(src: Curve, mu: np.ndarray) -> np.ndarray:
    """Normal derivative of the double layer with density ``mu`` on its own
    (smooth, equispaced) curve."""
    if not src.equispaced:
        raise InvalidInputError("spectral differentiation needs an equispaced curve")
    mu_t = spectral_derivative(mu, 1)
    nu = mu_t / src.dz
    nu_t = spectral_derivative(nu.real, 1) + 1j * spectral_derivative(nu.imag, 1)
    return cauchy_normal_derivative(src, nu, nu_t)


def _tail_estimate(mu: np.ndarray) -> float:
    """Size of the top quarter of the density spectrum (truncation proxy)."""
    M = mu.size
    c = np.abs(np.fft.rfft(mu)) / M
    return float(c[3 * M // 8 :].sum())


def _condition(A: np.ndarray) -> float:
    cond = float(np.linalg.cond(A))
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise IllConditionedError(f"boundary-integral system condition number {cond:.3g} exceeds {COND_LIMIT:.0e}")
    return cond


def _curves(domain: DomainPair, disc: Discretization, inner_inward: bool) -> tuple[Curve, Curve]:
    outer = discretize(1.0, domain.outer, disc.M)
    M_in = disc.inner_M or disc.M
    inner = discretize(domain.R, domain.inner, M_in, inward_normal=inner_inward, grading=disc.grading)
    return inner, outer


def _make_field(outer: Curve, dn: np.ndarray, est: float, cond: float) -> BoundaryField:
    if not np.all(dn < 0):
        warnings.warn(
            f"outer normal derivative is non-negative at {int(np.sum(dn >= 0))} node(s)", HopfViolationWarning, stacklevel=3
        )
    psi = project_zero_mean(analyze(dn))
    roundoff = 1e-14 * outer.size * float(np.max(np.abs(dn)))
    return BoundaryField(outer.theta.copy(), dn, float(np.mean(dn)), psi, max(est, roundoff), cond)


# --------------------------------------------------------------- Dirichlet


@dataclass
class AnnulusDirichletSolution:
    inner: Curve
    outer: Curve
    mu_in: np.ndarray
    mu_out: np.ndarray
    log_coeff: float
    condition: float

    def evaluate(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=complex).ravel()
        return (
            dlp_matrix(points, self.outer) @ self.mu_out
            + dlp_matrix(points, self.inner) @ self.mu_in
            + self.log_coeff * np.log(np.abs(points))
        )

    def outer_normal_derivative(self) -> np.ndarray:
        o = self.outer
        return (
            dlp_hypersingular_smooth(o, self.mu_out)
            + dlp_normal_matrix(o.z, o.normal, self.inner) @ self.mu_in
            + self.log_coeff * np.real(o.z * np.conj(o.normal)) / np.abs(o.z) ** 2
        )


def solve_annulus_dirichlet(domain: DomainPair, disc: Discretization, outer_data, inner_data) -> AnnulusDirichletSolution:
    """Harmonic u in the perturbed annulus with given Dirichlet data.

    u = D_out[mu_out] + D_in[mu_in] + A log|x|, closed by sum(w mu_in) = 0;
    the log term spans the one-dimensional gap left by the hole.  Data are
    callables of the complex node positions or arrays.
    """
    inner, outer = _curves(domain, disc, inner_inward=True)
    no, ni = outer.size, inner.size
    A = np.zeros((no + ni + 1, no + ni + 1))
    A[:no, :no] = 0.5 * np.eye(no) + dlp_self_matrix(outer)
    A[:no, no : no + ni] = dlp_matrix(outer.z, inner)
    A[:no, -1] = np.log(np.abs(outer.z))
    A[no : no + ni, :no] = dlp_matrix(inner.z, outer)
    A[no : no + ni, no : no + ni] = 0.5 * np.eye(ni) + dlp_self_matrix(inner)
    A[no : no + ni, -1] = np.log(np.abs(inner.z))
    A[-1, no : no + ni] = inner.w
    cond = _condition(A)
    rhs = np.zeros(no + ni + 1)
    rhs[:no] = outer_data(outer.z) if callable(outer_data) else outer_data
    rhs[no : no + ni] = inner_data(inner.z) if callable(inner_data) else inner_data
    x = np.linalg.solve(A, rhs)
    return AnnulusDirichletSolution(inner, outer, x[no : no + ni], x[:no], float(x[-1]), cond)


def solve_bernoulli_state(domain: DomainPair, disc: Discretization | None = None) -> BoundaryField:
    """u = 1 on the inner curve, 0 on the outer; returns the outer d_n u."""
    disc = disc or Discretization()
    sol = solve_annulus_dirichlet(domain, disc, 0.0, 1.0)
    dn = sol.outer_normal_derivative()
    return _make_field(sol.outer, dn, _tail_estimate(sol.mu_out), sol.condition)


# --------------------------------------------------------------- two-phase


@dataclass
class TransmissionSolution:
    inner: Curve
    outer: Curve
    phi: np.ndarray
    mu: np.ndarray
    jump: np.ndarray
    condition: float

    def evaluate(self, points) -> np.ndarray:
        """Harmonic remainder w at interior points (either phase)."""
        points = np.asarray(points, dtype=complex).ravel()
        return (
            dlp_matrix(points, self.inner) @ self.jump
            + slp_matrix(points, self.inner) @ self.phi
            + dlp_matrix(points, self.outer) @ self.mu
        )

    def outer_normal_derivative(self) -> np.ndarray:
        o = self.outer
        return (
            dlp_hypersingular_smooth(o, self.mu)
            + dlp_normal_matrix(o.z, o.normal, self.inner) @ self.jump
            + slp_normal_matrix(o.z, o.normal, self.inner) @ self.phi
        )


def solve_transmission(domain: DomainPair, sigma_c: float, disc: Discretization, jump, flux, outer_data) -> TransmissionSolution:
    """Harmonic w in D and in the annulus with

        w_in - w_out = h,  sigma_c d_n w_in - d_n w_out = q  on the inner curve,
        w_out = b  on the outer curve.

    ``jump(z, dz, d2z)`` returns (h, dh/dtheta, d2h/dtheta2) along the curve,
    ``flux(z, n)`` returns q, ``outer_data(z)`` returns b.

    w = D_in[h] + S_in[phi] + D_out[mu]; the double layer carries the jump,
    the single layer the flux mismatch.
    """
    inner, outer = _curves(domain, disc, inner_inward=False)
    no, ni = outer.size, inner.size
    s = sigma_c
    h, h_t, h_tt = jump(inner.z, inner.dz, inner.d2z)
    nu = h_t / inner.dz
    nu_t = (h_tt * inner.dz - h_t * inner.d2z) / inner.dz**2
    Nh = cauchy_normal_derivative(inner, nu, nu_t)
    A = np.zeros((ni + no, ni + no))
    A[:ni, :ni] = 0.5 * (s + 1) * np.eye(ni) + (s - 1) * adjoint_dlp_self_matrix(inner)
    A[:ni, ni:] = (s - 1) * dlp_normal_matrix(inner.z, inner.normal, outer)
    A[ni:, :ni] = slp_matrix(outer.z, inner)
    A[ni:, ni:] = 0.5 * np.eye(no) + dlp_self_matrix(outer)
    cond = _condition(A)
    rhs = np.empty(ni + no)
    rhs[:ni] = flux(inner.z, inner.normal) - (s - 1) * Nh
    rhs[ni:] = outer_data(outer.z) - dlp_matrix(outer.z, inner) @ h
    x = np.linalg.solve(A, rhs)
    return TransmissionSolution(inner, outer, x[:ni], x[ni:], h, cond)


def solve_two_phase_state(domain: DomainPair, spec: ProblemSpec, disc: Discretization | None = None) -> BoundaryField:
    """-div(sigma grad u) = 1 in the outer region, u = 0 on its boundary.

    Each phase subtracts -|x|^2/(2N sigma_phase); the harmonic remainders
    satisfy a transmission problem with a known jump and zero flux mismatch.
    """
    if not spec.is_two_phase:
        raise InvalidInputError("solve_two_phase_state needs a two-phase ProblemSpec")
    if spec.N != 2:
        raise InvalidInputError("the PDE engine is two-dimensional")
    disc = disc or Discretization()
    N, s = spec.N, spec.sigma_c
    c0 = (1.0 / s - 1.0) / (2 * N)

    def jump(z, dz, d2z):
        return (
            c0 * np.abs(z) ** 2,
            2 * c0 * np.real(z * np.conj(dz)),
            2 * c0 * (np.abs(dz) ** 2 + np.real(z * np.conj(d2z))),
        )

    sol = solve_transmission(
        domain, s, disc, jump, lambda z, n: np.zeros(z.size), lambda z: np.abs(z) ** 2 / (2 * N)
    )
    o = sol.outer
    dn = -np.real(o.z * np.conj(o.normal)) / N + sol.outer_normal_derivative()
    return _make_field(o, dn, _tail_estimate(sol.mu), sol.condition)


def solve_state(domain: DomainPair, spec: ProblemSpec, disc: Discretization | None = None) -> BoundaryField:
    if spec.is_two_phase:
        return solve_two_phase_state(domain, spec, disc)
    if spec.N != 2:
        raise InvalidInputError("the PDE engine is two-dimensional")
    return solve_bernoulli_state(domain, disc)


def eval_psi(field: BoundaryField) -> BoundaryFunction:
    """Zero-mean Fourier coefficients of the pulled-back d_n u (the removed
    mean is ``field.c``)."""
    if not field.hopf_ok:
        warnings.warn("outer normal derivative is non-negative somewhere", HopfViolationWarning, stacklevel=2)
    return project_zero_mean(analyze(field.dn_values))


def outer_flux(domain: DomainPair, spec: ProblemSpec, disc: Discretization, field: BoundaryField) -> float:
    """Integral of d_n u over the outer curve (conductivity is 1 there)."""
    o = discretize(1.0, domain.outer, disc.M)
    return float(np.sum(field.dn_values * o.w))


def enclosed_area(domain: DomainPair, M: int = 2048) -> float:
    th = 2 * np.pi * np.arange(M) / M
    rho = 1.0 + domain.outer.evaluate(th)
    return float(0.5 * np.mean(rho**2) * 2 * np.pi)


# ---------------------------------------------------- directional derivative


@dataclass(frozen=True)
class DerivativeEstimate:
    mode: tuple[int, str]
    side: str
    t: np.ndarray
    quotients: np.ndarray
    extrapolated: np.ndarray
    limit: float
    order: float
    converged: bool
    message: str = ""


def _mode_value(psi: BoundaryFunction, k: int, parity: str) -> float:
    c = psi.coefficient(k)
    return float(c[0] if parity == "cos" else c[1])


def directional_derivative_psi(
    mode: tuple[int, str],
    side: str,
    spec: ProblemSpec,
    t_list,
    disc: Discretization | None = None,
    central: bool = True,
    base_inner=None,
) -> DerivativeEstimate:
    """Finite-difference symbol of d_f Psi (side='inner') or d_g Psi
    (side='outer') on one Fourier mode, with Richardson extrapolation."""
    disc = disc or Discretization()
    k, parity = mode
    if k < 1:
        raise InvalidInputError("mode index must be >= 1")
    if side not in ("inner", "outer"):
        raise InvalidInputError("side must be 'inner' or 'outer'")
    t = np.asarray(t_list, dtype=float)
    if t.size < 2 or np.any(t <= 0) or np.any(np.diff(t) >= 0):
        raise InvalidInputError("t_list must hold at least two positive, decreasing values")
    e = BoundaryFunction.mode(k, 1.0, parity)
    zero = BoundaryFunction.zero()
    base_inner = zero if base_inner is None else base_inner

    def psi_at(tt):
        if side == "inner":
            d = DomainPair(spec.R, base_inner + tt * e, zero)
        else:
            d = DomainPair(spec.R, base_inner, tt * e)
        return _mode_value(solve_state(d, spec, disc).psi, k, parity)

    p0 = None if central else psi_at(0.0)
    q = []
    for tt in t:
        if central:
            q.append((psi_at(tt) - psi_at(-tt)) / (2 * tt))
        else:
            q.append((psi_at(tt) - p0) / tt)
    q = np.array(q)
    p = 2.0 if central else 1.0
    ratio = t[:-1] / t[1:]
    extr = q[1:] + (q[1:] - q[:-1]) / (ratio**p - 1.0)
    limit = float(extr[-1])
    order = float("nan")
    converged = True
    message = ""
    if q.size >= 3:
        d1, d2 = abs(q[1] - q[0]), abs(q[2] - q[1])
        floor = 1e-10 * max(abs(limit), 1e-300) + 1e-12
        if d2 <= floor:
            order = float("inf") if d1 > floor else float("nan")
        else:
            order = float(np.log(d1 / d2) / np.log(ratio[1]))
            if order < 0.5:
                converged = False
                message = f"difference quotients do not converge (observed order {order:.2f})"
    return DerivativeEstimate((k, parity), side, t, q, extr, limit, order, converged, message)
