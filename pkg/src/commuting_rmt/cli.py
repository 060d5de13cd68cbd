"""Command-line front end.

Subcommands: ``sample-hermitian``, ``equilibrium``, ``density-2x2`` and
``verify``. Exit codes: 0 success, 1 failed verification check, 2 bad
configuration, 3 sampler or minimizer failure.

All randomness comes from ``--seed``. Commands split it into independent
streams with ``numpy.random.SeedSequence(seed).spawn(k)``; the stream
layout is recorded under ``config.streams`` in every output.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from contextlib import nullcontext

import numpy as np

from . import io
from .densities import ExternalField, LogGas, log_rho_2x2_array, projected_density
from .equilibrium import EquilibriumLaw, equilibrium_radius, ks_distance_1d, minimize_energy, projected_cdf
from .errors import RMTError
from .mcmc import ChainConfig, initial_config, sample_chain
from .tuples import EigenConfig, haar_unitary, reconstruct_tuple

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_SAMPLER = 0, 1, 2, 3


class ConfigError(Exception):
    pass


def _streams(seed: int, names: list[str]) -> tuple[dict, dict]:
    children = np.random.SeedSequence(seed).spawn(len(names))
    seeds = {name: int(c.generate_state(1, np.uint64)[0]) for name, c in zip(names, children)}
    layout = {name: f"SeedSequence({seed}).spawn({len(names)})[{k}]" for k, name in enumerate(names)}
    return seeds, layout


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def _base_config(args) -> dict:
    skip = {"func", "out", "format", "json"}
    return {k.replace("_", "-"): v for k, v in sorted(vars(args).items()) if k not in skip}


def _histogram(x, edges, density_fn) -> dict:
    counts, _ = np.histogram(x, bins=edges)
    width = np.diff(edges)
    empirical = counts / (len(x) * width)
    rows = zip(edges[:-1], edges[1:], counts, empirical, density_fn(edges[:-1], edges[1:]))
    return io.table(["bin_left", "bin_right", "count", "empirical_density", "oracle_density"], rows)


def _emit(args, doc, summary: list[str]) -> None:
    if args.out:
        io.write_output(args.out, doc, args.format)
        stream = sys.stdout
    else:
        sys.stdout.write(io.emit(doc, args.format or "csv"))
        stream = sys.stderr
    for line in summary:
        print(line, file=stream)


# -- sample-hermitian ------------------------------------------------------


def cmd_sample_hermitian(args) -> int:
    _require(args.n >= 1 and args.d >= 1, "n and d must be positive")
    _require(args.gamma > 0, "gamma must be positive")
    _require(args.length >= 1 and args.chains >= 1 and args.thin >= 1, "length, chains and thin must be positive")
    _require(args.burn_in >= 0, "burn-in must be non-negative")
    seeds, layout = _streams(args.seed, ["init", "chain", "haar"])
    n, d = args.n, args.d
    per_chain = -(-args.length // args.chains)
    cfg = ChainConfig(
        seed=seeds["chain"],
        length=args.burn_in + per_chain * args.thin,
        burn_in=args.burn_in,
        thin=args.thin,
        n_chains=args.chains,
        moves="single",
        proposal_sigma=1.0,
    )
    Q = ExternalField(args.gamma)
    init = initial_config(n, d, args.gamma, rng=seeds["init"], n_chains=args.chains)
    # point order is arbitrary, so eigenvalues are stored chain by chain in sampler order
    draws = sample_chain(LogGas.ginibre(Q), init, cfg).samples[: args.length]

    cols = [f"x{i + 1}_{r + 1}" for i in range(n) for r in range(d)]
    data = {"eigenvalues": io.table(cols, draws.reshape(len(draws), n * d))}

    y = draws[..., 0].ravel() / math.sqrt(n)
    R = equilibrium_radius(d, args.gamma)
    cdf = projected_cdf(d, args.gamma)
    ks = ks_distance_1d(y, cdf)
    edges = np.linspace(-1.25 * R, 1.25 * R, 51)
    data["histogram"] = _histogram(y, edges, lambda a, b: (cdf(b) - cdf(a)) / (b - a))

    if args.reconstruct:
        rng = np.random.default_rng(seeds["haar"])
        rows = []
        for k, pts in enumerate(draws):
            X = reconstruct_tuple(EigenConfig(pts), haar_unitary(n, rng)).matrices
            for r in range(d):
                for i in range(n):
                    for j in range(n):
                        rows.append((k, r + 1, i + 1, j + 1, X[r, i, j].real, X[r, i, j].imag))
        data["matrices"] = io.table(["sample", "component", "row", "col", "re", "im"], rows)

    config = {"command": "sample-hermitian", **_base_config(args), "streams": layout, "chain-steps": cfg.length}
    doc = {"config": config, "data": data, "checks": {"projected_ks": ks}}
    _emit(args, doc, [f"KS(sqrt(n)-scaled first coordinate vs f_{d}) = {ks:.4f} over {y.size} values"])
    return EXIT_OK


# -- equilibrium -----------------------------------------------------------


def cmd_equilibrium(args) -> int:
    _require(args.n >= 2 and args.d >= 1, "need n >= 2 and d >= 1")
    _require(args.gamma > 0, "gamma must be positive")
    _require(args.max_iter >= 1 and args.tol > 0, "max-iter and tol must be positive")
    Q = ExternalField(args.gamma)
    rep = minimize_energy(args.n, args.d, Q, seed=args.seed, max_iter=args.max_iter, tol=args.tol, restarts=args.restarts)
    pts = rep.config.points
    R = equilibrium_radius(args.d, args.gamma)
    radii = np.linalg.norm(pts, axis=1)
    excess = float(radii.max() / R - 1.0)
    checks = {
        "energy": rep.energy,
        "gradient_norm": rep.gradient_norm,
        "converged": rep.converged,
        "iterations": rep.iterations,
        "radius": R,
        "max_radius": float(radii.max()),
        "min_radius": float(radii.min()),
        "support_excess": excess,
        "support_ok": excess <= 0.05,
    }
    summary = [
        f"energy {rep.energy:.8f}, |grad| {rep.gradient_norm:.2e}, converged={rep.converged}",
        f"radius R_{args.d} = {R:.6f}; max |x| = {radii.max():.6f} ({100 * excess:+.2f}%)",
    ]
    if args.d == 1:
        checks["support"] = [float(pts.min()), float(pts.max())]
        summary.append(f"support [{pts.min():.6f}, {pts.max():.6f}]")
    if args.d >= 4:
        spread = float(np.abs(radii / R - 1.0).max())
        checks["sphere_spread"] = spread
        checks["sphere_ok"] = spread <= 0.02
        summary.append(f"radii in [{radii.min():.6f}, {radii.max():.6f}], max deviation {100 * spread:.2f}%")

    x = np.linspace(-1.1 * R, 1.1 * R, 441)
    data = {
        "points": io.table([f"x{r + 1}" for r in range(args.d)], pts),
        "density": io.table(["x", "projected_density"], zip(x, projected_density(args.d, args.gamma, x))),
    }
    if args.d in (2, 3):
        r = np.linspace(0.0, R, 201)[:-1]
        law = EquilibriumLaw.gaussian(args.d, args.gamma)
        data["radial"] = io.table(["r", "radial_density"], zip(r, law.radial_density(r)))

    config = {"command": "equilibrium", **_base_config(args), "streams": {"restarts": f"SeedSequence({args.seed}).spawn({args.restarts})"}}
    _emit(args, {"config": config, "data": data, "checks": checks}, summary)
    return EXIT_OK if rep.converged else EXIT_SAMPLER


# -- density-2x2 -----------------------------------------------------------


def cmd_density_2x2(args) -> int:
    from .verify import gap_cdf_2x2, gap_ks_2x2

    _require(args.d >= 1, "d must be positive")
    _require(args.gamma > 0, "gamma must be positive")
    _require(args.grid_max > 0 and args.grid_points >= 2, "need grid-max > 0 and grid-points >= 2")
    d, gamma = args.d, args.gamma
    s = np.linspace(0.0, args.grid_max, args.grid_points)
    e = np.zeros((len(s), d), dtype=complex)
    e[:, 0] = s
    log_rho = log_rho_2x2_array(-e / 2, e / 2, d, gamma)
    if args.strip_gaussian:
        # exp(-gamma(|l1|^2 + |l2|^2)) = exp(-gamma s^2 / 2) at zero centre
        log_rho = log_rho + gamma * s**2 / 2
    with np.errstate(over="ignore"):
        rho = np.exp(log_rho)
    data = {"grid": io.table(["gap", "log_rho", "rho"], zip(s, log_rho, rho))}
    checks = {}
    summary = [f"rho^{d}: gap {s[0]:g} -> {rho[0]:.6g}, gap {s[1]:.4g} -> {rho[1]:.6g}"]

    layout = {}
    if args.mcmc:
        _require(args.length >= 1 and args.chains >= 1 and args.thin >= 1, "length, chains and thin must be positive")
        seeds, layout = _streams(args.seed, ["chain"])
        ks, samples = gap_ks_2x2(
            d, gamma, seeds["chain"], n_chains=args.chains, kept=args.length, burn_in=args.burn_in, thin=args.thin
        )
        cdf = gap_cdf_2x2(d, gamma)
        edges = np.linspace(0.0, float(np.quantile(samples.gap, 0.999)), 61)
        data["gap_histogram"] = _histogram(samples.gap, edges, lambda a, b: (cdf(b) - cdf(a)) / (b - a))
        checks = {"ks": ks, "acceptance_rate": samples.acceptance_rate, "samples": len(samples)}
        summary.append(f"KS(|Delta| samples vs quadrature) = {ks:.4f} over {len(samples)} draws")

    config = {"command": "density-2x2", **_base_config(args), "streams": layout}
    _emit(args, {"config": config, "data": data, "checks": checks}, summary)
    return EXIT_OK


# -- verify ----------------------------------------------------------------


def cmd_verify(args) -> int:
    from .verify import CHECKS, run_checks

    names = args.only or list(CHECKS)
    unknown = [n for n in names if n not in CHECKS]
    _require(not unknown, f"unknown check(s) {', '.join(unknown)}; available: {', '.join(CHECKS)}")
    results = run_checks(names, seed=args.seed, on_result=lambda r: print(r.line(), flush=True))
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    if args.json:
        doc = {
            "config": {"command": "verify", **_base_config(args)},
            "data": {},
            "checks": {r.name: r.as_dict() for r in results},
        }
        io.write_output(args.json, doc, "json")
    return EXIT_CHECK_FAILED if failed else EXIT_OK


# -- parser ----------------------------------------------------------------


def _output_args(p):
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--out", help="output file; stdout when omitted")
    p.add_argument("--format", choices=["csv", "json"], help="defaults to the --out suffix, else csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="commuting-rmt", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample-hermitian", help="Metropolis samples of joint eigenvalues of commuting Hermitian tuples")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--length", type=int, default=1000, help="number of output configurations")
    p.add_argument("--burn-in", type=int, default=1000, help="sweeps discarded per chain")
    p.add_argument("--thin", type=int, default=10, help="sweeps between kept configurations")
    p.add_argument("--chains", type=int, default=1, help="independent chains run in lockstep")
    p.add_argument("--reconstruct", action="store_true", help="also emit U diag(lambda) U* per sample")
    _output_args(p)
    p.set_defaults(func=cmd_sample_hermitian)

    p = sub.add_parser("equilibrium", help="discrete log-energy minimizer and closed-form laws")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--max-iter", type=int, default=20000)
    p.add_argument("--tol", type=float, default=1e-7, help="gradient-norm stopping tolerance")
    p.add_argument("--restarts", type=int, default=3)
    _output_args(p)
    p.set_defaults(func=cmd_equilibrium)

    p = sub.add_parser("density-2x2", help="eigenvalue density of commuting 2 x 2 tuples")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--grid-max", type=float, default=4.0)
    p.add_argument("--grid-points", type=int, default=81)
    p.add_argument("--strip-gaussian", action="store_true", help="drop the factor exp(-gamma(|l1|^2+|l2|^2))")
    p.add_argument("--mcmc", action="store_true", help="also sample the joint law and report KS of |Delta|")
    p.add_argument("--length", type=int, default=100, help="kept draws per chain with --mcmc")
    p.add_argument("--burn-in", type=int, default=5000)
    p.add_argument("--thin", type=int, default=20)
    p.add_argument("--chains", type=int, default=1000)
    _output_args(p)
    p.set_defaults(func=cmd_density_2x2)

    p = sub.add_parser("verify", help="run the oracle suite")
    p.add_argument("--only", action="append", metavar="CHECK", help="run only this check (repeatable)")
    p.add_argument("--json", metavar="PATH", help="write machine-readable results")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def _thread_limit():
    raw = os.environ.get("RMT_THREADS")
    if raw is None:
        return nullcontext()
    try:
        limit = int(raw)
    except ValueError:
        raise ConfigError(f"RMT_THREADS must be an integer, got {raw!r}") from None
    _require(limit >= 1, "RMT_THREADS must be at least 1")
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=limit)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with _thread_limit():
            return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RMTError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SAMPLER


if __name__ == "__main__":
    sys.exit(main())
