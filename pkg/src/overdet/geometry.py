"""Radial-graph curves rho(theta) = base + a(theta) and their quadrature nodes."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, InvalidInputError
from .spectral import BoundaryFunction


@dataclass(frozen=True)
class TentNotch:
    """Inward Lipschitz notch a(theta) = -t max(0, depth - R |theta - center|).

    Slope t in arclength; corners at center and center +- depth/R.
    """

    depth: float
    R: float
    t: float = 1.0
    center: float = np.pi / 2

    def __post_init__(self):
        if not self.depth > 0:
            raise InvalidInputError("notch depth must be positive")
        if self.depth >= self.R / 2:
            raise InvalidInputError(f"notch depth {self.depth} must be below R/2 = {self.R / 2}")
        if self.t < 0:
            raise InvalidInputError("notch scale t must be non-negative")

    @property
    def half_width(self) -> float:
        return self.depth / self.R

    @property
    def corners(self) -> tuple[float, ...]:
        if self.t == 0:
            return ()
        w = self.half_width
        return tuple(np.mod([self.center - w, self.center, self.center + w], 2 * np.pi))

    def scaled(self, t: float) -> "TentNotch":
        return TentNotch(self.depth, self.R, t, self.center)

    def evaluate(self, theta, derivative: int = 0) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        d = np.angle(np.exp(1j * (theta - self.center)))  # wrapped to (-pi, pi]
        inside = np.abs(d) < self.half_width
        if derivative == 0:
            return np.where(inside, -self.t * (self.depth - self.R * np.abs(d)), 0.0)
        if derivative == 1:
            return np.where(inside, self.t * self.R * np.sign(d), 0.0)
        return np.zeros_like(theta)

    def synthesize(self, M: int) -> np.ndarray:
        return self.evaluate(2 * np.pi * np.arange(M) / M)


def profile_corners(profile) -> tuple[float, ...]:
    return tuple(getattr(profile, "corners", ()))


@dataclass(frozen=True)
class Curve:
    """Quadrature nodes on a closed curve.

    ``z`` are the points (complex), ``dz``/``d2z`` derivatives with respect to
    the quadrature parameter theta, ``w`` the arclength weights (including any
    grading Jacobian), ``normal`` the unit normal used by the layer potentials.
    ``equispaced`` marks a periodic trapezoidal grid in theta where spectral
    differentiation is valid.
    """

    theta: np.ndarray
    z: np.ndarray
    dz: np.ndarray
    d2z: np.ndarray
    w: np.ndarray
    normal: np.ndarray
    equispaced: bool
    dtheta: np.ndarray  # theta-quadrature weights (trapezoid step times grading Jacobian)

    @property
    def size(self) -> int:
        return self.z.size

    @property
    def speed(self) -> np.ndarray:
        return np.abs(self.dz)

    @property
    def tangent(self) -> np.ndarray:
        return self.dz / np.abs(self.dz)

    def curvature_term(self) -> np.ndarray:
        """-(z''.n)/(2|z'|^2): diagonal limit of (y-x).n_y/|y-x|^2."""
        return -np.real(self.d2z * np.conj(self.normal)) / (2.0 * np.abs(self.dz) ** 2)


def _polar(base, profile, theta):
    rho = base + profile.evaluate(theta, 0)
    r1 = profile.evaluate(theta, 1)
    r2 = profile.evaluate(theta, 2)
    e = np.exp(1j * theta)
    z = rho * e
    dz = (r1 + 1j * rho) * e
    d2z = (r2 - rho + 2j * r1) * e
    return z, dz, d2z


def _grading_map(s, p):
    """Kress' sigmoidal map [0, 1] -> [0, 1] with p-th order flat ends."""
    v = lambda x: (1.0 / p - 0.5) * (1 - 2 * x) ** 3 + (2 * x - 1) / p + 0.5
    vs, vc = v(s) ** p, v(1 - s) ** p
    dv = lambda x: -6 * (1.0 / p - 0.5) * (1 - 2 * x) ** 2 + 2.0 / p
    dvs = p * v(s) ** (p - 1) * dv(s)
    dvc = -p * v(1 - s) ** (p - 1) * dv(1 - s)
    w = vs / (vs + vc)
    dw = (dvs * (vs + vc) - vs * (dvs + dvc)) / (vs + vc) ** 2
    return w, dw


def discretize(base: float, profile, M: int, inward_normal: bool = False, grading: int = 8) -> Curve:
    """Nodes for rho(theta) = base + profile(theta).

    Smooth profiles get M equispaced nodes; profiles with corners are split at
    the corners and graded towards them (corner points carry zero weight and
    are omitted).
    """
    corners = profile_corners(profile)
    if not corners:
        theta = 2 * np.pi * np.arange(M) / M
        dtheta = np.full(M, 2 * np.pi / M)
        equispaced = True
    else:
        cs = np.sort(np.mod(corners, 2 * np.pi))
        seg_lo = cs
        seg_len = np.diff(np.append(cs, cs[0] + 2 * np.pi))
        n_min = 24
        counts = np.maximum(n_min, np.round(M * seg_len / (2 * np.pi)).astype(int))
        thetas, dths = [], []
        for lo, L, n in zip(seg_lo, seg_len, counts):
            s = np.arange(1, n) / n
            w, dw = _grading_map(s, grading)
            # nodes squeezed onto a corner carry negligible weight; drop them
            keep = (w > 1e-12) & (w < 1 - 1e-12)
            thetas.append(lo + L * w[keep])
            dths.append(L * dw[keep] / n)
        theta = np.mod(np.concatenate(thetas), 2 * np.pi)
        dtheta = np.concatenate(dths)
        equispaced = False
    z, dz, d2z = _polar(base, profile, theta)
    speed = np.abs(dz)
    normal = -1j * dz / speed  # outward for a counterclockwise curve
    if inward_normal:
        normal = -normal
    return Curve(theta, z, dz, d2z, speed * dtheta, normal, equispaced, dtheta)


def radial_curvature(rho, drho, d2rho):
    """Signed curvature of a radial graph (1 on the unit circle)."""
    return (rho**2 + 2 * drho**2 - rho * d2rho) / (rho**2 + drho**2) ** 1.5


def check_annulus(R: float, inner, outer, samples: int = 4096):
    """Raise :class:`GeometryError` unless 0 < rho_in < rho_out everywhere."""
    th = 2 * np.pi * np.arange(samples) / samples
    extra = np.asarray(profile_corners(inner), dtype=float)
    th_in = np.concatenate([th, extra])
    rin = R + inner.evaluate(th_in)
    rout = 1.0 + outer.evaluate(th)
    if not np.all(np.isfinite(rin)) or not np.all(np.isfinite(rout)):
        raise GeometryError("non-finite curve radius")
    if rin.min() <= 0:
        raise GeometryError(f"inner curve reaches the origin (min radius {rin.min():.3g})")
    if rin.max() >= rout.min():
        raise GeometryError(f"curves overlap: max inner radius {rin.max():.4g} >= min outer radius {rout.min():.4g}")
    return float(rout.min() - rin.max())


def zero_profile() -> BoundaryFunction:
    return BoundaryFunction.zero()
