"""Acceptance criteria, each at its stated tolerance.

Every test appends one PASS/FAIL line to the terminal summary (and prints it),
then asserts.  Nothing is loosened: criteria whose reference values cannot be
reproduced fail here, and the corrected statements are covered in the unit
tests.
"""
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from overdet import formulas as fm
from overdet.errors import ResonanceError
from overdet.experiments import parse_config, run_counterexample
from overdet.formulas import ProblemSpec
from overdet.newton import SolveParams, asymptotic_check, solve_free_boundary, symmetry_check
from overdet.pde import DomainPair, directional_derivative_psi, solve_bernoulli_state, solve_two_phase_state
from overdet.spectral import BoundaryFunction, Discretization

DISC = Discretization(256, 64)
PARAMS = SolveParams()
REPORTS = []  # every solve report produced here, for the sign check


def record(n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_1_trivial_oracle():
    b = solve_bernoulli_state(DomainPair(0.5), DISC)
    t = solve_two_phase_state(DomainPair(0.5), ProblemSpec.two_phase(2.0, 0.5), DISC)
    eb = float(np.max(np.abs(b.dn_values - 1 / np.log(0.5))))
    et = float(np.max(np.abs(t.dn_values + 0.5)))
    record(1, eb <= 1e-10 and et <= 1e-10, f"bernoulli err {eb:.2e}, two-phase err {et:.2e} (tol 1e-10)")


def _symbol_job(args):
    spec, side, k = args
    est = directional_derivative_psi((k, "cos"), side, spec, (1e-2, 5e-3, 2.5e-3), DISC)
    m_f, m_g = fm.multipliers(k, spec)
    ref = m_g if side == "outer" else m_f
    return spec, side, k, est.limit, ref, abs(est.limit - ref) / abs(ref), est.converged


def test_2_multiplier_verification():
    specs = [ProblemSpec.bernoulli(0.5), ProblemSpec.two_phase(0.5, 0.5), ProblemSpec.two_phase(2.0, 0.5)]
    jobs = [(s, side, k) for s in specs for side in ("outer", "inner") for k in range(1, 9)]
    with ProcessPoolExecutor() as ex:
        res = list(ex.map(_symbol_job, jobs))
    parts, ok = [], True
    for s in specs:
        for side in ("outer", "inner"):
            sub = [r for r in res if r[0] == s and r[1] == side]
            worst = max(r[5] for r in sub)
            good = worst <= 1e-4 and all(r[6] for r in sub)
            ok &= good
            name = "bernoulli" if not s.is_two_phase else f"two-phase s={s.sigma_c:g}"
            parts.append(f"{name}/{side} max rel err {worst:.1e}{'' if good else ' FAIL'}")
    record(2, ok, "; ".join(parts) + " (tol 1e-4)")


def test_3_cross_formula_identity():
    worst, s1 = 0.0, 0.0
    for N in (2, 3, 5):
        for R in (0.3, 0.5, 0.9):
            s1 = max(s1, abs(fm.sigma_singular(1, N, R) - 1.0))
            for spec in [ProblemSpec.bernoulli(R, N)] + [ProblemSpec.two_phase(s, R, N) for s in (0.5, 2.0, 10.0)]:
                for k in range(1, 65):
                    m_f, m_g = fm.multipliers(k, spec)
                    c = fm.asymptotic_coefficient(k, spec)
                    worst = max(worst, abs(c + m_f / m_g) / max(1.0, abs(c)))
    record(3, worst <= 1e-12 and s1 <= 1e-14, f"max identity defect {worst:.1e} (tol 1e-12), |s(1)-1| {s1:.1e} (tol 1e-14)")


def test_4_newton_bernoulli():
    rep = solve_free_boundary(BoundaryFunction.mode(1, 0.05), ProblemSpec.bernoulli(0.5), PARAMS, DISC)
    REPORTS.append(rep)
    g1 = rep.g_final.coefficient(1)[0]
    rel = abs(g1 - 0.025) / 0.025
    ok = rep.converged and rep.residual_history[-1] <= 1e-9 and rep.iterations <= 20 and rel <= 0.1
    record(4, ok, f"converged={rep.converged} in {rep.iterations} iterations, residual {rep.residual_history[-1]:.1e}; "
                  f"mode-1 coefficient {g1:.6f} vs 0.025 (rel dev {rel:.2f}, tol 0.10)")


def test_5_asymptotic_order():
    parts, ok = [], True
    for spec in (ProblemSpec.bernoulli(0.5), ProblemSpec.two_phase(2.0, 0.5)):
        rows = asymptotic_check(BoundaryFunction.mode(1), spec, (0.04, 0.02, 0.01), PARAMS, DISC,
                                predictor=fm.first_order_g, workers=3)
        REPORTS.extend(r["report"] for r in rows)
        r = [row["ratio"] for row in rows]
        good = r[0] > r[1] > r[2] and r[2] / r[0] <= 0.5 and all(row["converged"] for row in rows)
        ok &= good
        parts.append(f"{spec.kind.value} ratios {r[0]:.3e},{r[1]:.3e},{r[2]:.3e} "
                     f"(r(0.01)/r(0.04)={r[2] / r[0]:.3f}){'' if good else ' FAIL'}")
    record(5, ok, "; ".join(parts) + " (need monotone, <= 0.5)")


def test_6_resonance_guard():
    s2 = fm.sigma_singular(2, 2, 0.9)
    f = BoundaryFunction.mode(2, 0.01)
    refused = []
    for sc in (s2, s2 + 9e-7, s2 - 9e-7):
        try:
            solve_free_boundary(f, ProblemSpec.two_phase(sc, 0.9), PARAMS, DISC)
            refused.append(False)
        except ResonanceError as exc:
            refused.append(exc.k == 2 and "k=2" in str(exc))
    rep = solve_free_boundary(f, ProblemSpec.two_phase(0.5, 0.9), PARAMS, DISC)
    REPORTS.append(rep)
    record(6, all(refused) and rep.converged,
           f"s(2)={s2:.10f}; refused within 1e-6 naming k=2: {refused}; sigma_c=0.5 converged={rep.converged} "
           f"in {rep.iterations} iterations")


def test_7_symmetry():
    parts, ok = [], True
    cases = [BoundaryFunction.mode(2, 0.03), BoundaryFunction.from_trig([0, 0.03, 0, 0.009])]
    for spec in (ProblemSpec.bernoulli(0.5), ProblemSpec.two_phase(2.0, 0.5)):
        for f in cases:
            good, asym, rep = symmetry_check(f, 0.0, spec, PARAMS, DISC)
            REPORTS.append(rep)
            ok &= good and rep.converged
            parts.append(f"{asym:.1e}")
    record(7, ok, f"asymmetry norms {', '.join(parts)} (tol {10 * PARAMS.residual_tol:.0e})")


def test_8_counterexample():
    cfg = parse_config('{"perturbation": {"family": "tent_notch", "depth": 0.05},'
                       ' "discretization": {"M": 256, "K": 64, "inner_M": 512}}')
    res = run_counterexample(cfg)
    REPORTS.append(res["main_report"])
    th = res["threshold"]
    ok = th.success and not th.inner_convex and th.min_curvature > 0 and res["control_max_dev"] <= 1e-12
    record(8, ok, f"threshold t={res['threshold_t']:.4g}: inner convex={th.inner_convex}, outer min curvature "
                  f"{th.min_curvature:.6f}; control curvature deviation {res['control_max_dev']:.1e}")


def test_9_hopf_sign():
    if not REPORTS:
        pytest.skip("run together with the other criteria")
    fields = [r.field for r in REPORTS if r.converged and r.field is not None]
    worst = max(float(np.max(f.dn_values)) for f in fields)
    record(9, worst < 0, f"{len(fields)} converged solves, largest outer normal derivative {worst:.4f}")
