"""Command-line front end: ``overdet <command> --config cfg.json --out dir``.

Exit codes: 0 success, 1 numerical failure (including a failed verification),
2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile

import numpy as np

from . import experiments as ex
from .errors import ConfigError, OverdetError

log = logging.getLogger("overdet")


def _atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(type(o).__name__)


def _clean(o):
    # JSON has no inf/nan
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    if isinstance(o, dict):
        return {k: _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    return o


def _json(payload: dict) -> str:
    return json.dumps(_clean(json.loads(json.dumps(payload, default=_json_default))), indent=2, sort_keys=True) + "\n"


# ------------------------------------------------------------------ commands


def cmd_multipliers(cfg, args) -> int:
    table = ex.run_multipliers(cfg)
    _atomic_write(os.path.join(args.out, "multipliers.csv"), _csv(table.columns(), table.rows()))
    return 0


def cmd_verify_linearization(cfg, args) -> int:
    rows = ex.run_verify_linearization(cfg, args.workers)
    cols = ["side", "k", "parity", "estimate", "reference", "rel_err", "order", "fd_converged", "pass"]
    _atomic_write(os.path.join(args.out, "linearization.csv"), _csv(cols, ([r[c] for c in cols] for r in rows)))
    failed = [r for r in rows if not r["pass"]]
    for r in rows:
        print(f"{'PASS' if r['pass'] else 'FAIL'} {r['side']:5s} k={r['k']:<3d} estimate={r['estimate']:+.10f} "
              f"reference={r['reference']:+.10f} rel_err={r['rel_err']:.2e}")
    print(f"{len(rows) - len(failed)}/{len(rows)} modes within rel_tol={cfg.linearization.rel_tol:g}")
    return 1 if failed else 0


def cmd_solve(cfg, args) -> int:
    rep = ex.run_solve(cfg)
    payload = ex.provenance(cfg) | {"report": rep.to_dict()}
    _atomic_write(os.path.join(args.out, "solve.json"), _json(payload))
    _atomic_write(os.path.join(args.out, "residuals.csv"),
                  _csv(["iteration", "residual", "coeff_l2"],
                       ([i + 1, r, c] for i, (r, c) in enumerate(zip(rep.residual_history, rep.coeff_history)))))
    print(f"converged={rep.converged} iterations={rep.iterations} residual={rep.residual_history[-1]:.3e}")
    return 0 if rep.converged else 1


def cmd_asymptotics(cfg, args) -> int:
    rows = ex.run_asymptotics(cfg, args.workers)
    _atomic_write(os.path.join(args.out, "asymptotics.csv"),
                  _csv(["t", "ratio", "converged", "iterations"],
                       ([r["t"], r["ratio"], r["converged"], r["iterations"]] for r in rows)))
    payload = ex.provenance(cfg) | {"rows": [{k: v for k, v in r.items() if k != "report"} | {"report": r["report"].to_dict()}
                                             for r in rows]}
    _atomic_write(os.path.join(args.out, "asymptotics.json"), _json(payload))
    ratios = [r["ratio"] for r in rows]
    monotone = all(b < a for a, b in zip(ratios, ratios[1:]))
    print(f"ratios={['%.3e' % x for x in ratios]} monotone={monotone}")
    return 0 if all(r["converged"] for r in rows) else 1


def cmd_symmetry(cfg, args) -> int:
    ok, asym, rep = ex.run_symmetry(cfg)
    payload = ex.provenance(cfg) | {"axis": cfg.symmetry_axis, "asymmetry": asym, "pass": ok, "report": rep.to_dict()}
    _atomic_write(os.path.join(args.out, "symmetry.json"), _json(payload))
    print(f"asymmetry={asym:.3e} pass={ok}")
    return 0 if ok and rep.converged else 1


def cmd_sigma_table(cfg, args) -> int:
    rows = ex.run_sigma_table(cfg)
    cols = ["N", "R", "k", "s_k", "in_Sigma"]
    _atomic_write(os.path.join(args.out, "sigma_table.csv"), _csv(cols, ([r[c] for c in cols] for r in rows)))
    return 0


def cmd_counterexample(cfg, args) -> int:
    res = ex.run_counterexample(cfg)
    payload = ex.provenance(cfg) | {
        "control": res["control"].to_dict(),
        "control_max_curvature_deviation": res["control_max_dev"],
        "main": res["main"].to_dict(),
        "main_report": res["main_report"].to_dict(),
        "threshold_t": res["threshold_t"],
        "threshold": res["threshold"].to_dict(),
    }
    _atomic_write(os.path.join(args.out, "counterexample.json"), _json(payload))
    th = 2 * np.pi * np.arange(cfg.discretization.M) / cfg.discretization.M
    _atomic_write(os.path.join(args.out, "curvature.csv"),
                  _csv(["theta", "kappa_main", "kappa_threshold"],
                       zip(th, res["main"].curvature, res["threshold"].curvature)))
    m = res["main"]
    print(f"t={m.t} inner_convex={m.inner_convex} outer_min_curvature={m.min_curvature:.6f} "
          f"threshold_t={res['threshold_t']:.4g}")
    return 0 if res["threshold"].success else 1


COMMANDS = {
    "multipliers": cmd_multipliers,
    "verify-linearization": cmd_verify_linearization,
    "solve": cmd_solve,
    "asymptotics": cmd_asymptotics,
    "symmetry": cmd_symmetry,
    "sigma-table": cmd_sigma_table,
    "counterexample": cmd_counterexample,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="overdet", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="JSON configuration file (defaults apply when omitted)")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--workers", type=int, default=1, help="parallel workers for sweeps")
    p.add_argument("--seed", type=int, default=0, help="reserved; all algorithms are deterministic")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.workers < 1:
        parser.error("--workers must be >= 1")
    try:
        if args.config:
            try:
                with open(args.config, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(f"cannot read config: {exc}") from None
        else:
            text = "{}"
        cfg = ex.parse_config(text)
        if args.out == "out" and cfg.raw.get("output", {}).get("dir"):
            args.out = cfg.raw["output"]["dir"]
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OverdetError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
