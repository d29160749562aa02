"""Exploratory onset of asymmetry in dimension n >= 2, against the restricted threshold q_hat.

No exact onset is known here; the output is an estimate with a mesh study.

    python3 scripts/explore_2d.py --n 2 --p 2 --r 2
"""

import argparse
import time
from pathlib import Path

import numpy as np

from twistshape.emit import Table, emit
from twistshape.params import q_hat
from twistshape.reduced import restricted_threshold
from twistshape.twoball import bifurcation_sweep, critical_q


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--p", type=float, default=2.0)
    ap.add_argument("--r", type=float, default=2.0)
    ap.add_argument("--meshes", default="200,400,800")
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    n, p, r = args.n, args.p, args.r
    qh = q_hat(p, r, n)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    th = restricted_threshold(p, r, n, (qh - 1.0, qh + 1.0))
    print(f"q_hat = {qh:.6f}; restricted onset {th.q_c:.6f} (subcritical: {th.subcritical})")

    lo = max(1.05, r - 1 + 0.05, qh - 1.5)
    grid = np.arange(lo, qh + 0.5 + 1e-9, 0.25)
    diag = bifurcation_sweep(n, p, r, grid, refine_tol=None)
    emit(Table(("q", "y_star", "lambda_star", "kkt_residual", "mesh"), list(diag.rows()), csv_meta=False),
         "csv", str(out / f"sweep_n{n}_p{p:g}_r{r:g}.csv"))
    for q, y, lam in zip(diag.q_values, diag.y_star, diag.lambda_star):
        print(f"  q={q:6.3f}  y*={y:.5f}  lambda*={lam:.8f}")
    if diag.q_critical is None:
        print("no onset inside the grid")
        return
    ys = np.array(diag.y_star)
    k = int(np.argmax(ys > 1e-3))
    bracket = (diag.q_values[k - 1], diag.q_values[k]) if k > 0 else (lo - 1.0, diag.q_values[0])
    rows = []
    for m in (int(s) for s in args.meshes.split(",")):
        t0 = time.perf_counter()
        qc = critical_q(n, p, r, bracket, tol_q=0.02, m=m)
        rows.append((m, qc, qh - qc, time.perf_counter() - t0))
        print(f"m={m:4d}  q_c={qc:.4f}  (q_hat - q_c = {qh - qc:.4f})  [{rows[-1][3]:.1f}s]")
    emit(Table(("mesh", "q_critical", "gap_to_q_hat", "seconds"), rows,
               {"n": n, "p": p, "r": r, "q_hat": qh, "exploratory": True}),
         "csv", str(out / f"qcrit_n{n}_p{p:g}_r{r:g}.csv"))


if __name__ == "__main__":
    main()
