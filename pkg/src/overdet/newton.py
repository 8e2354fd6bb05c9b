"""Free-boundary solve: find g with Psi(f, g) = 0.

The Jacobian is frozen at the concentric configuration, where d_g Psi(0, 0)
is the diagonal Fourier multiplier m_g(k).  Each step costs one state solve:

    g <- g - damping * L^{-1} Pi_0 Psi(f, g),     L = diag(m_g(k)), k <= K.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import formulas
from .errors import GeometryError, InvalidInputError
from .formulas import ProblemSpec
from .geometry import TentNotch
from .pde import BoundaryField, DomainPair, solve_state
from .spectral import BoundaryFunction, Discretization, analyze, project_zero_mean

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolveParams:
    max_iter: int = 50
    residual_tol: float = 1e-9
    damping: float = 1.0
    K: int | None = None  # defaults to the discretization cutoff
    singular_guard_tol: float = 1e-6
    initial_guess: str = "first_order"  # or "zero"

    def __post_init__(self):
        if self.max_iter < 1:
            raise InvalidInputError("max_iter must be >= 1")
        if not self.residual_tol > 0 or not self.singular_guard_tol > 0:
            raise InvalidInputError("tolerances must be positive")
        if not 0 < self.damping <= 1:
            raise InvalidInputError("damping must lie in (0, 1]")
        if self.initial_guess not in ("first_order", "zero"):
            raise InvalidInputError("initial_guess must be 'first_order' or 'zero'")


@dataclass(frozen=True)
class SolveReport:
    g_final: BoundaryFunction
    c_final: float
    residual_history: list[float]
    iterations: int
    converged: bool
    multiplier_condition: float
    coeff_history: list[float] = field(default_factory=list)
    field: BoundaryField | None = None
    message: str = ""

    def to_dict(self) -> dict:
        a, b = self.g_final.trig()
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "c_final": self.c_final,
            "residual_history": list(self.residual_history),
            "coeff_l2_history": list(self.coeff_history),
            "multiplier_condition": self.multiplier_condition,
            "g_final": {"cos": a.tolist(), "sin": b.tolist()},
            "hopf_ok": None if self.field is None else self.field.hopf_ok,
            "max_dn": None if self.field is None else float(np.max(self.field.dn_values)),
            "message": self.message,
        }


def inner_as_function(f, M: int, K: int) -> BoundaryFunction:
    """Fourier view of an inner perturbation (band-limited or tent notch)."""
    if isinstance(f, BoundaryFunction):
        return f.truncate(K)
    return analyze(f.synthesize(M), K=K)


def _sup(fn: BoundaryFunction, M: int = 2048) -> float:
    return fn.sup_norm(M)


def solve_free_boundary(
    f,
    spec: ProblemSpec,
    params: SolveParams | None = None,
    disc: Discretization | None = None,
    g0: BoundaryFunction | None = None,
) -> SolveReport:
    """Quasi-Newton iteration for the outer curve matching inner perturbation ``f``.

    ``f`` is the inner normal displacement (a :class:`BoundaryFunction` or a
    :class:`TentNotch`).  Raises :class:`ResonanceError` when sigma_c is too
    close to a resonance and :class:`GeometryError` (with ``.report`` set to
    the last valid iterate) when an iterate leaves the admissible geometry.
    """
    params = params or SolveParams()
    disc = disc or Discretization()
    K = params.K or disc.K
    if 4 * K > disc.M:
        raise InvalidInputError(f"mode cutoff K={K} exceeds M/4")
    formulas.check_resonance(spec, K, params.singular_guard_tol)
    table = formulas.MultiplierTable.build(spec, K)
    m_g = table.m_g

    if g0 is not None:
        g = project_zero_mean(g0).truncate(K)
    elif params.initial_guess == "first_order":
        g = formulas.first_order_g_exact(inner_as_function(f, disc.M, K), spec, K, params.singular_guard_tol)
    else:
        g = BoundaryFunction.zero()

    history: list[float] = []
    coeff_hist: list[float] = []
    last_field = None
    last_valid = g
    for it in range(1, params.max_iter + 1):
        try:
            domain = DomainPair(spec.R, f, g)
        except GeometryError as exc:
            report = SolveReport(last_valid, float("nan") if last_field is None else last_field.c, history, it - 1,
                                 False, table.condition, coeff_hist, last_field, f"geometry violation: {exc}")
            exc.report = report
            raise
        fld = solve_state(domain, spec, disc)
        last_field, last_valid = fld, g
        res = float(np.max(np.abs(fld.dn_values - fld.c)))
        a, b = fld.psi.trig(K)
        history.append(res)
        coeff_hist.append(float(np.sqrt(np.sum(a[1:] ** 2 + b[1:] ** 2))))
        log.debug("iteration %d residual %.3e", it, res)
        if res <= params.residual_tol:
            return SolveReport(g, fld.c, history, it, True, table.condition, coeff_hist, fld)
        step = BoundaryFunction.from_trig(
            np.concatenate([[0.0], a[1:] / m_g]), np.concatenate([[0.0], b[1:] / m_g])
        )
        g = g - params.damping * step
    return SolveReport(last_valid, last_field.c, history, params.max_iter, False, table.condition, coeff_hist,
                       last_field, f"no convergence in {params.max_iter} iterations")


def _solve_scaled(args):
    f, t, spec, params, disc = args
    ft = f.scaled(t) if isinstance(f, TentNotch) else t * f
    return solve_free_boundary(ft, spec, params, disc)


def asymptotic_check(
    f,
    spec: ProblemSpec,
    t_list,
    params: SolveParams | None = None,
    disc: Discretization | None = None,
    predictor: Callable = formulas.first_order_g,
    workers: int = 1,
) -> list[dict]:
    """Rows (t, ||g(t f) - t g1||_inf / t) with g1 = predictor(f)."""
    params = params or SolveParams()
    disc = disc or Discretization()
    K = params.K or disc.K
    t = [float(x) for x in t_list]
    if any(x <= 0 for x in t) or any(b >= a for a, b in zip(t, t[1:])):
        raise InvalidInputError("t_list must be positive and decreasing")
    g1 = predictor(inner_as_function(f, disc.M, K), spec, K)
    jobs = [(f, x, spec, params, disc) for x in t]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            reports = list(ex.map(_solve_scaled, jobs))
    else:
        reports = [_solve_scaled(j) for j in jobs]
    rows = []
    for x, rep in zip(t, reports):
        err = _sup(rep.g_final - x * g1)
        rows.append({"t": x, "ratio": err / x, "converged": rep.converged, "iterations": rep.iterations,
                     "report": rep})
    return rows


def reflect(fn, axis: float):
    """theta -> fn(2 axis - theta) as a callable on angles."""
    return lambda theta: fn.evaluate(2 * axis - np.asarray(theta))


def symmetry_check(
    f,
    axis: float,
    spec: ProblemSpec,
    params: SolveParams | None = None,
    disc: Discretization | None = None,
    grid: int = 2048,
) -> tuple[bool, float, SolveReport]:
    """Solve for g and measure ||g - g o gamma||_inf for the reflection gamma
    across the line at angle ``axis``.  ``f`` must itself be invariant."""
    params = params or SolveParams()
    th = 2 * np.pi * np.arange(grid) / grid
    if np.max(np.abs(f.evaluate(th) - reflect(f, axis)(th))) > 1e-12:
        raise InvalidInputError("inner perturbation is not invariant under the reflection")
    rep = solve_free_boundary(f, spec, params, disc)
    asym = float(np.max(np.abs(rep.g_final.evaluate(th) - reflect(rep.g_final, axis)(th))))
    return asym <= 10 * params.residual_tol, asym, rep
