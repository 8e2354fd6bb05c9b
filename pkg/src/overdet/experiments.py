"""Experiment configuration and orchestration (no file I/O here)."""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, formulas
from .errors import ConfigError, InvalidInputError
from .formulas import MultiplierTable, ProblemKind, ProblemSpec
from .geometry import TentNotch, radial_curvature
from .newton import SolveParams, asymptotic_check, solve_free_boundary, symmetry_check
from .pde import directional_derivative_psi
from .spectral import BoundaryFunction, Discretization

SCHEMA_VERSION = 1

_SECTIONS = {
    "schema_version", "problem", "discretization", "solve", "perturbation", "multipliers", "linearization",
    "asymptotics", "symmetry", "sigma_table", "counterexample", "output",
}


@dataclass(frozen=True)
class LinearizationSettings:
    modes: tuple[int, ...] = (1, 2, 3, 4, 5, 6, 7, 8)
    sides: tuple[str, ...] = ("outer", "inner")
    parity: str = "cos"
    t_list: tuple[float, ...] = (1e-2, 5e-3, 2.5e-3)
    rel_tol: float = 1e-4
    reference: str = "closed_form"  # or "rescaled" (Bernoulli inner symbol divided by R)


@dataclass(frozen=True)
class AsymptoticSettings:
    t_list: tuple[float, ...] = (0.04, 0.02, 0.01)
    predictor: str = "closed_form"


@dataclass(frozen=True)
class SigmaTableSettings:
    K: int = 64
    N: tuple[int, ...] = (2,)
    R: tuple[float, ...] = (0.3, 0.5, 0.9)


@dataclass(frozen=True)
class CounterexampleSettings:
    t: float = 0.2
    t_max: float = 1.0
    bisection_steps: int = 6


@dataclass(frozen=True)
class ExperimentConfig:
    problem: ProblemSpec = field(default_factory=ProblemSpec)
    discretization: Discretization = field(default_factory=Discretization)
    solve: SolveParams = field(default_factory=SolveParams)
    perturbation: dict = field(default_factory=lambda: {"family": "fourier_mode", "k": 1, "amplitude": 0.05})
    multipliers_K: int = 8
    linearization: LinearizationSettings = field(default_factory=LinearizationSettings)
    asymptotics: AsymptoticSettings = field(default_factory=AsymptoticSettings)
    symmetry_axis: float = 0.0
    sigma_table: SigmaTableSettings = field(default_factory=SigmaTableSettings)
    counterexample: CounterexampleSettings = field(default_factory=CounterexampleSettings)
    raw: dict = field(default_factory=dict, compare=False)

    def inner_perturbation(self):
        return build_perturbation(self.perturbation, self.problem)

    def echo(self) -> dict:
        return self.raw


def build_perturbation(p: dict, spec: ProblemSpec):
    family = p.get("family")
    if family == "fourier_mode":
        return BoundaryFunction.mode(int(p["k"]), float(p.get("amplitude", 1.0)), p.get("parity", "cos"))
    if family == "coefficients":
        cos = list(p.get("cos", [0.0]))
        sin = list(p.get("sin", [0.0] * len(cos)))
        n = max(len(cos), len(sin))
        cos += [0.0] * (n - len(cos))
        sin += [0.0] * (n - len(sin))
        return BoundaryFunction.from_trig(cos, sin)
    if family == "tent_notch":
        return TentNotch(float(p["depth"]), spec.R, float(p.get("t", 1.0)), float(p.get("center", np.pi / 2)))
    raise ConfigError(f"perturbation.family must be fourier_mode, coefficients or tent_notch; got {family!r}")


def _section(raw, key, allowed):
    sec = raw.get(key, {}) or {}
    if not isinstance(sec, dict):
        raise ConfigError(f"{key}: expected an object")
    extra = set(sec) - set(allowed)
    if extra:
        raise ConfigError(f"{key}: unknown field(s) {sorted(extra)}")
    return sec


def _tuple(v):
    return tuple(v) if isinstance(v, (list, tuple)) else (v,)


def parse_config(text: str) -> ExperimentConfig:
    """Parse and fully validate a JSON configuration."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigError("top level must be a JSON object")
    unknown = set(raw) - _SECTIONS
    if unknown:
        raise ConfigError(f"unknown section(s) {sorted(unknown)}")
    if raw.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {raw.get('schema_version')!r}")
    try:
        pr = _section(raw, "problem", {"kind", "N", "R", "sigma_c"})
        spec = ProblemSpec(ProblemKind(pr.get("kind", "bernoulli")), int(pr.get("N", 2)), float(pr.get("R", 0.5)),
                           None if pr.get("sigma_c") is None else float(pr["sigma_c"]))
        disc = Discretization(**_section(raw, "discretization", {"M", "K", "quad_tol", "inner_M", "grading"}))
        solve = SolveParams(**_section(raw, "solve", {"max_iter", "residual_tol", "damping", "K", "singular_guard_tol",
                                                      "initial_guess"}))
        pert = _section(raw, "perturbation", {"family", "k", "amplitude", "parity", "cos", "sin", "depth", "t", "center"})
        pert = pert or {"family": "fourier_mode", "k": 1, "amplitude": 0.05}
        build_perturbation(pert, spec)
        mk = int(_section(raw, "multipliers", {"K"}).get("K", 8))
        if mk < 1:
            raise ConfigError("multipliers.K must be >= 1")
        lin = _section(raw, "linearization", {"modes", "sides", "parity", "t_list", "rel_tol", "reference"})
        lin = LinearizationSettings(**{k: (_tuple(v) if k in ("modes", "sides", "t_list") else v) for k, v in lin.items()})
        if set(lin.sides) - {"inner", "outer"} or lin.reference not in ("closed_form", "rescaled"):
            raise ConfigError("linearization: sides must be inner/outer, reference closed_form/rescaled")
        asy = _section(raw, "asymptotics", {"t_list", "predictor"})
        asy = AsymptoticSettings(**{k: (_tuple(v) if k == "t_list" else v) for k, v in asy.items()})
        if asy.predictor not in ("closed_form", "rescaled"):
            raise ConfigError("asymptotics.predictor must be closed_form or rescaled")
        for name, ts in (("linearization.t_list", lin.t_list), ("asymptotics.t_list", asy.t_list)):
            if len(ts) < 2 or any(t <= 0 for t in ts) or any(b >= a for a, b in zip(ts, ts[1:])):
                raise ConfigError(f"{name} must hold >= 2 positive decreasing values")
        axis = float(_section(raw, "symmetry", {"axis"}).get("axis", 0.0))
        st = _section(raw, "sigma_table", {"K", "N", "R"})
        st = SigmaTableSettings(**{k: (_tuple(v) if k in ("N", "R") else v) for k, v in st.items()})
        for R in st.R:
            if not 0 < R < 1:
                raise ConfigError("sigma_table.R values must lie in (0, 1)")
        ce = CounterexampleSettings(**_section(raw, "counterexample", {"t", "t_max", "bisection_steps"}))
        if ce.t < 0 or ce.t_max <= 0 or ce.bisection_steps < 0:
            raise ConfigError("counterexample: t >= 0, t_max > 0, bisection_steps >= 0 required")
        _section(raw, "output", {"dir"})
    except ConfigError:
        raise
    except (InvalidInputError, TypeError, ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from None
    return ExperimentConfig(spec, disc, solve, pert, mk, lin, asy, axis, st, ce, raw)


def provenance(cfg: ExperimentConfig) -> dict:
    return {"schema_version": SCHEMA_VERSION, "version": __version__, "config": cfg.echo()}


# ------------------------------------------------------------------ commands


def run_multipliers(cfg: ExperimentConfig) -> MultiplierTable:
    return MultiplierTable.build(cfg.problem, cfg.multipliers_K)


def _reference_symbol(k, side, spec, reference):
    if side == "outer":
        return formulas.outer_multiplier(k, spec)
    if reference == "rescaled" and not spec.is_two_phase:
        return formulas.inner_multiplier_bernoulli_exact(k, spec)
    return formulas.multipliers(k, spec)[0]


def _linearization_job(args):
    k, side, cfg = args
    lin = cfg.linearization
    est = directional_derivative_psi((k, lin.parity), side, cfg.problem, lin.t_list, cfg.discretization)
    ref = _reference_symbol(k, side, cfg.problem, lin.reference)
    rel = abs(est.limit - ref) / abs(ref)
    return {
        "side": side, "k": k, "parity": lin.parity, "estimate": est.limit, "reference": ref, "rel_err": rel,
        "order": est.order, "fd_converged": est.converged, "pass": bool(est.converged and rel <= lin.rel_tol),
    }


def run_verify_linearization(cfg: ExperimentConfig, workers: int = 1) -> list[dict]:
    jobs = [(k, side, cfg) for side in cfg.linearization.sides for k in cfg.linearization.modes]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(_linearization_job, jobs))
    return [_linearization_job(j) for j in jobs]


def run_solve(cfg: ExperimentConfig):
    return solve_free_boundary(cfg.inner_perturbation(), cfg.problem, cfg.solve, cfg.discretization)


def run_asymptotics(cfg: ExperimentConfig, workers: int = 1) -> list[dict]:
    pred = formulas.first_order_g if cfg.asymptotics.predictor == "closed_form" else formulas.first_order_g_exact
    return asymptotic_check(cfg.inner_perturbation(), cfg.problem, cfg.asymptotics.t_list, cfg.solve,
                            cfg.discretization, predictor=pred, workers=workers)


def run_symmetry(cfg: ExperimentConfig):
    return symmetry_check(cfg.inner_perturbation(), cfg.symmetry_axis, cfg.problem, cfg.solve, cfg.discretization)


def run_sigma_table(cfg: ExperimentConfig) -> list[dict]:
    rows = []
    for N in cfg.sigma_table.N:
        for R in cfg.sigma_table.R:
            for k in range(1, cfg.sigma_table.K + 1):
                s = formulas.sigma_singular(k, N, R)
                rows.append({"N": N, "R": R, "k": k, "s_k": s, "in_Sigma": s > 0})
    return rows


# ------------------------------------------------------------ counterexample


@dataclass(frozen=True)
class CurvatureReport:
    t: float
    curvature: np.ndarray
    min_curvature: float
    outer_convex: bool
    inner_convex: bool
    converged: bool

    @property
    def success(self) -> bool:
        return self.converged and self.min_curvature > 0 and not self.inner_convex

    def to_dict(self) -> dict:
        return {"t": self.t, "min_curvature": self.min_curvature, "max_curvature": float(self.curvature.max()),
                "outer_convex": self.outer_convex, "inner_convex": self.inner_convex, "converged": self.converged,
                "success": self.success}


def outer_curvature(g: BoundaryFunction, M: int) -> np.ndarray:
    th = 2 * np.pi * np.arange(M) / M
    return radial_curvature(1.0 + g.evaluate(th), g.evaluate(th, 1), g.evaluate(th, 2))


def inner_is_convex(f, R: float, M: int = 4096) -> bool:
    """Tent notches are decided analytically: an inward wedge is never convex."""
    if isinstance(f, TentNotch):
        return f.t == 0
    th = 2 * np.pi * np.arange(M) / M
    kappa = radial_curvature(R + f.evaluate(th), f.evaluate(th, 1), f.evaluate(th, 2))
    return bool(np.all(kappa >= 0))


def curvature_report(f, cfg: ExperimentConfig) -> tuple[CurvatureReport, object]:
    try:
        rep = solve_free_boundary(f, cfg.problem, cfg.solve, cfg.discretization)
    except Exception as exc:  # geometry failures count as "not admissible" during the search
        if getattr(exc, "report", None) is None:
            raise
        rep = exc.report
    kappa = outer_curvature(rep.g_final, cfg.discretization.M)
    t = getattr(f, "t", float("nan"))
    return CurvatureReport(t, kappa, float(kappa.min()), bool(np.all(kappa >= 0)), inner_is_convex(f, cfg.problem.R),
                           rep.converged), rep


def run_counterexample(cfg: ExperimentConfig) -> dict:
    base = cfg.inner_perturbation()
    if not isinstance(base, TentNotch):
        raise ConfigError("counterexample needs perturbation.family = tent_notch")
    ce = cfg.counterexample
    control, _ = curvature_report(base.scaled(0.0), cfg)
    main, main_rep = curvature_report(base.scaled(ce.t), cfg)
    hi_rep, _ = curvature_report(base.scaled(ce.t_max), cfg)
    if hi_rep.success:
        threshold, at = ce.t_max, hi_rep
    else:
        lo, hi = 0.0, ce.t_max
        at = control
        for _ in range(ce.bisection_steps):
            mid = 0.5 * (lo + hi)
            r, _ = curvature_report(base.scaled(mid), cfg)
            if r.success:
                lo, at = mid, r
            else:
                hi = mid
        threshold = lo
    return {
        "control": control,
        "main": main,
        "main_report": main_rep,
        "threshold_t": threshold,
        "threshold": at,
        "control_max_dev": float(np.max(np.abs(control.curvature - 1.0))),
    }


def config_to_dict(cfg: ExperimentConfig) -> dict:
    d = asdict(cfg)
    d.pop("raw", None)
    return d
