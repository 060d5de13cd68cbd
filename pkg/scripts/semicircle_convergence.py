"""KS distance of sqrt(n)-scaled Hermitian eigenvalues to f_d as n grows.

    python3 scripts/semicircle_convergence.py --d 1 --sizes 8 16 32 64 --out semicircle.csv
"""

import argparse
import math

from commuting_rmt import io
from commuting_rmt.densities import ExternalField, LogGas
from commuting_rmt.equilibrium import ks_distance_1d, projected_cdf
from commuting_rmt.mcmc import ChainConfig, initial_config, sample_chain


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--d", type=int, default=1)
    ap.add_argument("--gamma", type=float, default=0.5)
    ap.add_argument("--sizes", type=int, nargs="+", default=[8, 16, 32, 64])
    ap.add_argument("--chains", type=int, default=200)
    ap.add_argument("--burn-in", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="semicircle_convergence.csv")
    args = ap.parse_args()

    Q = ExternalField(args.gamma)
    cdf = projected_cdf(args.d, args.gamma)
    rows = []
    for k, n in enumerate(args.sizes):
        init = initial_config(n, args.d, args.gamma, rng=[args.seed, k, 0], n_chains=args.chains)
        cfg = ChainConfig(
            seed=args.seed + k, length=args.burn_in + 1, burn_in=args.burn_in,
            n_chains=args.chains, moves="single", proposal_sigma=1.0,
        )
        res = sample_chain(LogGas.ginibre(Q), init, cfg)
        y = res.samples[..., 0].ravel() / math.sqrt(n)
        ks = ks_distance_1d(y, cdf)
        rows.append((n, y.size, ks, res.acceptance_rate))
        print(f"n={n:4d}  values={y.size:6d}  KS={ks:.4f}  acceptance={res.acceptance_rate:.2f}", flush=True)

    doc = {
        "config": {"script": "semicircle_convergence", **vars(args)},
        "data": {"ks_by_n": io.table(["n", "values", "ks", "acceptance"], rows)},
        "checks": {},
    }
    io.write_output(args.out, doc)


if __name__ == "__main__":
    main()
