#!/usr/bin/env python3
"""FP/FN equalization sweeps: one loss asymmetry at a time from the
symmetric position (sigma=1, the disproportionate-mistakes setting).

Writes sweep_phi0.csv and sweep_psi0.csv and prints the estimated crossing
of the group-0 and group-1 error-rate curves.
"""

import argparse
from pathlib import Path

import numpy as np

from asymloss.simlab import SimConfig, find_crossing, run_equalization_sweep
from asymloss.tables import write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--reps", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--step", type=float, default=0.25)
    ap.add_argument("--out-dir", default="out/equalization")
    args = ap.parse_args()

    base = SimConfig(
        n=args.n, replications=args.reps, seed=args.seed, sigma=1.0,
        psi0=1.0, psi1=1.0, phi0=1.0, phi1=1.0,
    )
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sweeps = (
        ("phi0", np.arange(1.0, 2.5 + 1e-9, args.step), "fp0", "fp1"),
        ("psi0", np.arange(1.5, 4.5 + 1e-9, 2 * args.step), "fn0", "fn1"),
    )
    for param, grid, k0, k1 in sweeps:
        rows = run_equalization_sweep(base, param, grid, jobs=args.jobs)
        write_csv(out / f"sweep_{param}.csv", ["param", "value", "fp0", "fp1", "fn0", "fn1"], rows)
        cross = find_crossing([r["value"] for r in rows], [r[k0] - r[k1] for r in rows])
        print(f"{param}: {k0}/{k1} curves cross at {param} ~= {cross}")


if __name__ == "__main__":
    main()
