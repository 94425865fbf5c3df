"""Horodecki-family sweep of pure and mixed entanglement (3x3, N_alpha = 12).

Writes a CSV (default results/horodecki.csv). Points in the zero region
alpha in [2, 3] usually stall near E ~ 1e-8 without meeting the residual
tolerance; they are reported with converged=false.
"""

import argparse
import time
from pathlib import Path

from entrelax.structures import SolverConfig
from entrelax.sweep import SweepSpec, rows_to_csv, run_sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--step", type=float, default=0.25)
    ap.add_argument("--nalpha", type=int, default=12)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-iter", type=int, default=2000)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/horodecki.csv")
    args = ap.parse_args()

    spec = SweepSpec("horodecki", 2.0, 5.0, args.step, args.nalpha, "both")
    cfg = SolverConfig(seed=args.seed, max_iter=args.max_iter)
    t0 = time.perf_counter()
    rows = run_sweep(spec, cfg, workers=args.workers)
    elapsed = time.perf_counter() - t0

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(rows_to_csv(rows))
    print(f"{len(rows)} points in {elapsed:.1f}s; wrote {out}")
    for r in rows:
        print(f"alpha={r['param']:.2f}  E_pure={r['E_pure']:.6f}  E_mixed={r['E_mixed']:.6f}  "
              f"converged={r['converged']}")


if __name__ == "__main__":
    main()
