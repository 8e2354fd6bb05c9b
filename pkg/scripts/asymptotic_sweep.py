#!/usr/bin/env python3
"""Remainder ratios ||g(tf) - t g1||/t for the closed-form and rescaled first-order predictors."""
import argparse

import numpy as np

from overdet import formulas as fm
from overdet.formulas import ProblemSpec
from overdet.newton import SolveParams, asymptotic_check
from overdet.spectral import BoundaryFunction, Discretization


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--R", type=float, default=0.5)
    ap.add_argument("--sigma", type=float, default=2.0)
    ap.add_argument("--k", type=int, default=1)
    ap.add_argument("--workers", type=int, default=4)
    a = ap.parse_args()
    t = (0.08, 0.04, 0.02, 0.01, 0.005)
    f = BoundaryFunction.mode(a.k)
    disc = Discretization(256, 64)
    cases = [
        ("bernoulli/closed", ProblemSpec.bernoulli(a.R), fm.first_order_g),
        ("bernoulli/rescaled", ProblemSpec.bernoulli(a.R), fm.first_order_g_exact),
        (f"two_phase {a.sigma:g}", ProblemSpec.two_phase(a.sigma, a.R), fm.first_order_g),
    ]
    print("case".ljust(22) + "".join(f"t={x:<10g}" for x in t) + "slope")
    for name, spec, pred in cases:
        rows = asymptotic_check(f, spec, t, SolveParams(), disc, predictor=pred, workers=a.workers)
        r = np.array([row["ratio"] for row in rows])
        slope = np.polyfit(np.log(t), np.log(r), 1)[0]
        print(name.ljust(22) + "".join(f"{x:<12.3e}" for x in r) + f"{slope:.2f}")


if __name__ == "__main__":
    main()
