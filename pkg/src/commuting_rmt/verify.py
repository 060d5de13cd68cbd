"""Named oracle checks with fixed seeds.

Each check compares a library routine against an independent computation
(quadrature, finite differences, exact tables, Monte Carlo) and reports the
measured error next to its threshold. Check ``k`` in :data:`CHECKS` draws
its randomness from ``default_rng([seed, k])``.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy.integrate import dblquad, quad

from .densities import (
    ExternalField,
    LogGas,
    k_n_functional,
    log_ginibre_density,
    log_rho_2x2,
    log_rho_2x2_array,
    log_scaled_density,
    projected_density,
    radial_integral,
)
from .equilibrium import (
    EquilibriumLaw,
    axis_projection,
    discrete_energy,
    equilibrium_radius,
    ks_distance_1d,
    law_cdf_1d,
    minimize_energy,
    projected_cdf,
    sample_equilibrium,
)
from .jacobians import (
    UnipotentParam,
    _vandermonde_sq,
    gamma_det_closed,
    gamma_matrix_2x2,
    hermitian_chart,
    log_integrand_thmd2,
    numeric_gram_jacobian,
    tangent_dimension,
    triangular_chart,
)
from .mcmc import ChainConfig, initial_config, sample_2x2_joint, sample_chain
from .tuples import (
    Banner,
    EigenConfig,
    Irreducibility,
    dim_banner_stratum,
    dim_variety,
    haar_unitary,
    hoffman_wielandt_gap,
    irreducibility_status,
    multi_spectrum,
    multiset_distance,
    reconstruct_tuple,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    measured: float
    threshold: float
    elapsed: float
    budget: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.measured <= self.threshold and self.elapsed <= self.budget)

    def as_dict(self) -> dict:
        return {**asdict(self), "passed": self.passed}

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status}  {self.name:<26} measured={self.measured:.3e}  threshold={self.threshold:.1e}  "
            f"time={self.elapsed:.1f}s/{self.budget:.0f}s  {self.detail}"
        )


def _random_point(rng, d):
    return rng.standard_normal(d) + 1j * rng.standard_normal(d)


# -- chart and density oracles ---------------------------------------------


def check_gamma_det(rng):
    worst = 0.0
    for _ in range(1000):
        d = int(rng.integers(1, 6))
        l1, l2 = _random_point(rng, d), _random_point(rng, d)
        alpha = complex(rng.standard_normal(), rng.standard_normal())
        numeric = float(np.real(np.linalg.det(gamma_matrix_2x2(l1, l2, alpha))))
        closed = (1 + 2 * abs(alpha) ** 2) ** (d - 1) * float(np.sum(np.abs(l2 - l1) ** 2))
        worst = max(worst, abs(numeric - closed) / closed, abs(gamma_det_closed(d, l1, l2, alpha) - closed) / closed)
    return worst, 1e-10, 1.0, "1000 draws, d <= 5"


def check_radial_integral(rng):
    worst = 0.0
    for d in range(1, 9):
        for k in (0.1, 0.5, 1.0, 2.0, 10.0):
            f = lambda r: math.exp(-k * r * r) * (1 + 2 * r * r) ** (d - 1) * r  # noqa: E731
            ref = quad(f, 0, math.inf, epsabs=0, epsrel=1e-13, limit=200)[0]
            worst = max(worst, abs(radial_integral(d, k) - ref) / ref)
    return worst, 1e-8, 1.0, "d = 1..8, five k values"


def check_hermitian_chart(rng):
    worst = 0.0
    for n in (2, 3):
        for d in (1, 2, 3):
            a = EigenConfig(rng.standard_normal((n, d)))
            b = EigenConfig(rng.standard_normal((n, d)))
            ga = numeric_gram_jacobian(hermitian_chart(a))
            gb = numeric_gram_jacobian(hermitian_chart(b))
            want = _vandermonde_sq(a.points) / _vandermonde_sq(b.points)
            worst = max(worst, abs(ga / gb / want - 1))
    return worst, 1e-3, 30.0, "n in {2,3}, d in {1,2,3}"


def check_nonhermitian_chart(rng):
    worst = 0.0
    for d in (1, 2, 3):
        ratios = []
        for _ in range(20):
            l1, l2 = _random_point(rng, d), _random_point(rng, d)
            alpha = complex(rng.standard_normal(), rng.standard_normal())
            chart = triangular_chart(EigenConfig(np.array([l1, l2])), UnipotentParam.from_alpha(alpha))
            ratios.append(numeric_gram_jacobian(chart) / gamma_det_closed(d, l1, l2, alpha))
        ratios = np.array(ratios)
        worst = max(worst, float(ratios.std() / ratios.mean()))
    return worst, 1e-3, 30.0, "std/mean of Gram/|det Gamma|, 20 base points per d"


def _alpha_integral(centre, direction, s, d, gamma):
    l1 = centre - 0.5 * s * direction
    l2 = centre + 0.5 * s * direction
    lam = EigenConfig(np.array([l1, l2]))
    # the Gaussian weight of the eigenvalues does not depend on alpha; factor it out
    base = -gamma * float(np.sum(np.abs(l1) ** 2) + np.sum(np.abs(l2) ** 2))

    def f(r, theta):
        A = UnipotentParam.from_alpha(r * complex(math.cos(theta), math.sin(theta)))
        return math.exp(log_integrand_thmd2(lam, A, gamma) - base) * r

    val = dblquad(f, 0.0, 2 * math.pi, 0.0, math.inf, epsabs=0, epsrel=1e-10)[0]
    return base + math.log(val), l1, l2


def check_integrand_quadrature(rng):
    gamma = 1.0
    worst = 0.0
    for d in (1, 2, 3):
        centre = 0.3 * _random_point(rng, d)
        direction = _random_point(rng, d)
        direction /= np.linalg.norm(direction)
        diffs = []
        for s in np.linspace(0.25, 3.0, 20):
            log_int, l1, l2 = _alpha_integral(centre, direction, s, d, gamma)
            diffs.append(log_int - log_rho_2x2(l1, l2, d, gamma).log_value)
        diffs = np.array(diffs)
        worst = max(worst, float(diffs.max() - diffs.min()))
    return worst, 1e-4, 300.0, "spread of log(integral) - log rho over 20 gaps, d = 1,2,3"


def gap_cdf_2x2(d: int, gamma: float, top: float = 12.0, knots: int = 3001):
    """CDF of |lambda2 - lambda1| under rho^d, by one-dimensional quadrature.

    The eigenvalue centre integrates out of the Gaussian factor, leaving
    s^(2d-1) rho^d(-s e/2, s e/2) for a unit vector e.
    """

    def dens(s):
        if s <= 0:
            return 0.0
        e = np.zeros(d, dtype=complex)
        e[0] = s
        return s ** (2 * d - 1) * math.exp(log_rho_2x2_array(-e / 2, e / 2, d, gamma))

    total = quad(dens, 0, math.inf)[0]
    grid = np.linspace(0.0, top / math.sqrt(gamma), knots)
    steps = [quad(dens, a, b)[0] for a, b in zip(grid[:-1], grid[1:])]
    values = np.concatenate([[0.0], np.cumsum(steps)]) / total
    return lambda x: np.interp(x, grid, values, right=1.0)


def gap_ks_2x2(d: int, gamma: float, seed, n_chains: int = 1000, kept: int = 100, burn_in: int = 5000, thin: int = 20):
    cfg = ChainConfig(
        seed=seed, length=burn_in + kept * thin, burn_in=burn_in, thin=thin, n_chains=n_chains, proposal_sigma=0.5
    )
    samples = sample_2x2_joint(d, gamma, cfg)
    return ks_distance_1d(samples.gap, gap_cdf_2x2(d, gamma)), samples


def check_density_2x2_mcmc(rng):
    worst = 0.0
    for d in (1, 2, 3):
        ks, _ = gap_ks_2x2(d, 1.0, int(rng.integers(2**32)))
        worst = max(worst, ks)
    return worst, 0.02, 300.0, "KS of |Delta|, 1e5 draws per d"


# -- equilibrium oracles ---------------------------------------------------


def check_semicircle(rng):
    n, gamma, chains = 64, 0.5, 200
    Q = ExternalField(gamma)
    init = initial_config(n, 1, gamma, rng=rng, n_chains=chains)
    cfg = ChainConfig(
        seed=int(rng.integers(2**32)), length=501, burn_in=500, n_chains=chains, moves="single", proposal_sigma=1.0
    )
    res = sample_chain(LogGas.ginibre(Q), init, cfg)
    y = res.samples[..., 0].ravel() / math.sqrt(n)
    ks = ks_distance_1d(y, law_cdf_1d(EquilibriumLaw.gaussian(1, gamma)))
    return ks, 0.05, 600.0, f"n=64, {chains} independent chains, acceptance {res.acceptance_rate:.2f}"


def check_projection_laws(rng):
    worst = 0.0
    for d in (2, 3, 4, 6):
        law = EquilibriumLaw.gaussian(d, 1.0)
        x = axis_projection(sample_equilibrium(law, 100_000, rng))
        worst = max(worst, ks_distance_1d(x, projected_cdf(d, 1.0)))
    return worst, 0.03, 60.0, "1e5 draws, d in {2,3,4,6}"


def check_projection_normalization(rng):
    worst = 0.0
    for d in range(1, 9):
        R = equilibrium_radius(d, 1.0)
        mass = quad(lambda x: projected_density(d, 1.0, x), -R, R, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
        worst = max(worst, abs(mass - 1.0))
    return worst, 1e-8, 60.0, "d = 1..8"


def check_minimizer_disk(rng):
    rep = minimize_energy(200, 2, ExternalField(1.0), seed=int(rng.integers(2**32)), tol=1e-6)
    R = equilibrium_radius(2, 1.0)
    excess = float(np.linalg.norm(rep.config.points, axis=1).max() / R - 1.0)
    if not rep.converged:
        return math.inf, 0.05, 300.0, "minimizer did not converge"
    return max(excess, 0.0), 0.05, 300.0, f"n=200, max radius {R * (1 + excess):.4f} vs R={R:.4f}"


def check_minimizer_sphere(rng):
    rep = minimize_energy(200, 5, ExternalField(1.0), seed=int(rng.integers(2**32)), tol=1e-6)
    R = equilibrium_radius(5, 1.0)
    radii = np.linalg.norm(rep.config.points, axis=1)
    spread = float(np.abs(radii / R - 1.0).max())
    if not rep.converged:
        return math.inf, 0.02, 300.0, "minimizer did not converge"
    return spread, 0.02, 300.0, f"n=200, radii in [{radii.min():.4f}, {radii.max():.4f}], R={R:.4f}"


def check_minimizer_gap(rng):
    Q = ExternalField(0.5)
    rep = minimize_energy(2, 1, Q, seed=int(rng.integers(2**32)), functional="k_n")
    if not rep.converged:
        return math.inf, 1e-6, 60.0, "minimizer did not converge"
    pts = rep.config.points
    gap = float(abs(pts[1, 0] - pts[0, 0]))
    return abs(gap - 2.0), 1e-6, 60.0, f"K_n minimizer of two points, gap {gap:.9f}"


# -- exact tables and properties -------------------------------------------

_BANNER_TABLE = [((3, 1, (1, 1, 1)), 9), ((2, 2, (1, 1)), 6), ((4, 3, (2, 1, 1)), 23)]
_VARIETY_TABLE = [((2, 1, True), 4), ((2, 3, True), 8), ((2, 2, False), 6)]
_TANGENT_TABLE = [((2, 3, False), 16), ((2, 3, True), 14), ((3, 1, False), 18)]
_IRRED_TABLE = [
    ((3, 32), Irreducibility.REDUCIBLE),
    ((7, 3), Irreducibility.IRREDUCIBLE),
    ((3, 15), Irreducibility.UNKNOWN),
]


def combinatorics_mismatches(rng) -> list[str]:
    bad = []
    for (n, d, b), want in _BANNER_TABLE:
        got = dim_banner_stratum(n, d, Banner(b))
        if got != want:
            bad.append(f"banner{(n, d, b)}={got}")
    for (n, d, herm), want in _VARIETY_TABLE:
        got = dim_variety(n, d, herm)
        if got != want:
            bad.append(f"variety{(n, d, herm)}={got}")
    for (n, d, tri), want in _TANGENT_TABLE:
        D = np.array([np.diag(_random_point(rng, n)) for _ in range(d)])
        got = tangent_dimension(D, triangular_only=tri)
        if got != want:
            bad.append(f"tangent{(n, d, tri)}={got}")
    for (d, n), want in _IRRED_TABLE:
        got = irreducibility_status(d, n)
        if got is not want:
            bad.append(f"irreducibility{(d, n)}={got.value}")
    return bad


def check_combinatorics(rng):
    bad = combinatorics_mismatches(rng)
    return float(len(bad)), 0.0, 1.0, ", ".join(bad) or "all table entries exact"


def _random_hermitian(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


def check_hoffman_wielandt(rng):
    worst = -math.inf
    for _ in range(1000):
        n = int(rng.integers(1, 17))
        lhs, rhs = hoffman_wielandt_gap(_random_hermitian(rng, n), _random_hermitian(rng, n))
        worst = max(worst, lhs - rhs)
    return worst, 1e-9, 60.0, "max of lhs - rhs over 1000 pairs, n <= 16"


def check_round_trip(rng):
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 9))
        d = int(rng.integers(1, 5))
        hermitian = bool(rng.integers(2))
        pts = rng.standard_normal((n, d)) if hermitian else rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
        lam = EigenConfig(pts)
        X = reconstruct_tuple(lam, haar_unitary(n, rng))
        back = multi_spectrum(X, rng=rng)
        scale = max(1.0, float(np.abs(pts).max()))
        worst = max(worst, multiset_distance(lam, back) / scale)
    return worst, 1e-8, 60.0, "200 tuples, n <= 8, d <= 4"


def check_permutation_invariance(rng):
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(2, 7))
        d = int(rng.integers(1, 5))
        Q = ExternalField(float(rng.uniform(0.2, 2.0)))
        pts = rng.standard_normal((n, d))
        perm = rng.permutation(n)
        for f in (
            lambda p: log_ginibre_density(p, Q).log_value,
            lambda p: log_scaled_density(p, Q).log_value,
            lambda p: k_n_functional(p, Q),
            lambda p: discrete_energy(p, Q),
        ):
            a, b = f(pts), f(pts[perm])
            worst = max(worst, abs(a - b) / max(1.0, abs(a)))
        l1, l2 = _random_point(rng, d), _random_point(rng, d)
        a = log_rho_2x2(l1, l2, d, Q.gamma).log_value
        b = log_rho_2x2(l2, l1, d, Q.gamma).log_value
        worst = max(worst, abs(a - b) / max(1.0, abs(a)))
    return worst, 1e-12, 60.0, "log-gas, K_n, discrete energy, rho^d"


def check_attraction(rng):
    """rho^3 must increase strictly as the gap shrinks toward zero."""
    d, gamma = 3, 1.0
    centre = 0.2 * _random_point(rng, d)
    direction = _random_point(rng, d)
    direction /= np.linalg.norm(direction)
    gaps = np.geomspace(1.0, 1e-6, 60)
    values = np.array(
        [log_rho_2x2(centre - s * direction / 2, centre + s * direction / 2, d, gamma).log_value for s in gaps]
    )
    violations = int(np.sum(np.diff(values) <= 0))
    at_zero = log_rho_2x2(centre, centre, d, gamma).log_value
    if not (math.isinf(at_zero) and at_zero > 0):
        violations += 1
    return float(violations), 0.0, 60.0, "log rho^3 along a ray toward coincidence"


CHECKS: dict[str, Callable] = {
    "gamma-det": check_gamma_det,
    "radial-integral": check_radial_integral,
    "hermitian-chart": check_hermitian_chart,
    "nonhermitian-chart": check_nonhermitian_chart,
    "integrand-quadrature": check_integrand_quadrature,
    "density-2x2-mcmc": check_density_2x2_mcmc,
    "semicircle": check_semicircle,
    "projection-laws": check_projection_laws,
    "projection-normalization": check_projection_normalization,
    "minimizer-disk": check_minimizer_disk,
    "minimizer-sphere": check_minimizer_sphere,
    "minimizer-gap": check_minimizer_gap,
    "combinatorics": check_combinatorics,
    "hoffman-wielandt": check_hoffman_wielandt,
    "round-trip": check_round_trip,
    "permutation-invariance": check_permutation_invariance,
    "attraction": check_attraction,
}


def run_check(name: str, seed: int = 0) -> CheckResult:
    if name not in CHECKS:
        raise KeyError(f"unknown check {name!r}; choose from {', '.join(CHECKS)}")
    stream = list(CHECKS).index(name)
    rng = np.random.default_rng([seed, stream])
    start = time.perf_counter()
    measured, threshold, budget, detail = CHECKS[name](rng)
    elapsed = time.perf_counter() - start
    return CheckResult(name, float(measured), float(threshold), elapsed, float(budget), detail)


def run_checks(names=None, seed: int = 0, on_result: Callable[[CheckResult], None] | None = None) -> list[CheckResult]:
    results = []
    for name in names or CHECKS:
        res = run_check(name, seed)
        if on_result is not None:
            on_result(res)
        results.append(res)
    return results
