#!/usr/bin/env python3
"""Finite-difference symbols of Psi against the closed forms, k = 1..K.

Writes multiplier_check.csv with the measured value, the closed-form value and
(for the Bernoulli inner side) the rescaled symbol.
"""
import argparse
import csv
from concurrent.futures import ProcessPoolExecutor

from overdet import formulas as fm
from overdet.formulas import ProblemSpec
from overdet.pde import directional_derivative_psi
from overdet.spectral import Discretization


def job(args):
    spec, side, k, M = args
    est = directional_derivative_psi((k, "cos"), side, spec, (1e-2, 5e-3, 2.5e-3), Discretization(M, M // 4))
    m_f, m_g = fm.multipliers(k, spec)
    closed = m_g if side == "outer" else m_f
    alt = fm.inner_multiplier_bernoulli_exact(k, spec) if (side == "inner" and not spec.is_two_phase) else closed
    label = "bernoulli" if not spec.is_two_phase else f"two_phase_{spec.sigma_c:g}"
    return [label, spec.R, side, k, est.limit, closed, alt, abs(est.limit / closed - 1), abs(est.limit / alt - 1)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--R", type=float, default=0.5)
    ap.add_argument("--K", type=int, default=8)
    ap.add_argument("--M", type=int, default=256)
    ap.add_argument("--out", default="multiplier_check.csv")
    ap.add_argument("--workers", type=int, default=4)
    a = ap.parse_args()
    specs = [ProblemSpec.bernoulli(a.R), ProblemSpec.two_phase(0.5, a.R), ProblemSpec.two_phase(2.0, a.R)]
    jobs = [(s, side, k, a.M) for s in specs for side in ("outer", "inner") for k in range(1, a.K + 1)]
    with ProcessPoolExecutor(a.workers) as ex:
        rows = list(ex.map(job, jobs))
    with open(a.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["problem", "R", "side", "k", "measured", "closed_form", "rescaled", "rel_err_closed", "rel_err_rescaled"])
        w.writerows(rows)
    for r in rows:
        print(f"{r[0]:14s} {r[2]:5s} k={r[3]}  measured {r[4]:+.8f}  closed {r[5]:+.8f}  rel {r[7]:.1e}  "
              f"rescaled rel {r[8]:.1e}")


if __name__ == "__main__":
    main()
