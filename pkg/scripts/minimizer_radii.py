"""Discrete log-energy minimizers across dimensions.

For each d, reports the spread of point radii against the closed-form
support radius, and for d = 1 the energy trend in n.

    python3 scripts/minimizer_radii.py --dims 1 2 3 4 5 6 --n 200 --out radii.csv
"""

import argparse

import numpy as np

from commuting_rmt import io
from commuting_rmt.densities import ExternalField
from commuting_rmt.equilibrium import equilibrium_radius, minimize_energy


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--dims", type=int, nargs="+", default=[1, 2, 3, 4, 5, 6])
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--gamma", type=float, default=1.0)
    ap.add_argument("--trend-sizes", type=int, nargs="+", default=[25, 50, 100, 200])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="minimizer_radii.csv")
    args = ap.parse_args()

    Q = ExternalField(args.gamma)
    radii_rows = []
    for d in args.dims:
        rep = minimize_energy(args.n, d, Q, seed=args.seed, tol=1e-6)
        r = np.linalg.norm(rep.config.points, axis=1)
        R = equilibrium_radius(d, args.gamma)
        radii_rows.append((d, R, r.min(), np.median(r), r.max(), rep.energy, rep.converged))
        print(f"d={d}  R={R:.4f}  radii [{r.min():.4f}, {r.max():.4f}]  energy={rep.energy:.6f}", flush=True)

    trend_rows = []
    for n in args.trend_sizes:
        rep = minimize_energy(n, 1, Q, seed=args.seed, tol=1e-7)
        trend_rows.append((n, rep.energy))
        print(f"d=1 n={n:4d}  energy={rep.energy:.6f}", flush=True)

    data = {
        "radii": io.table(["d", "radius", "min_r", "median_r", "max_r", "energy", "converged"], radii_rows),
        "energy_trend": io.table(["n", "energy"], trend_rows),
    }
    io.write_output(args.out, {"config": {"script": "minimizer_radii", **vars(args)}, "data": data, "checks": {}})


if __name__ == "__main__":
    main()
