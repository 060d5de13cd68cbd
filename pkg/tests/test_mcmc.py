import math

import numpy as np
import pytest
from scipy.integrate import dblquad
from scipy.special import gammainc

from commuting_rmt.densities import ExternalField, LogGas
from commuting_rmt.equilibrium import ks_distance_1d
from commuting_rmt.errors import InitNotFinite, ZeroAcceptance
from commuting_rmt.mcmc import (
    ChainConfig,
    acceptance_probability,
    batch_means_se,
    initial_config,
    ldp_concentration,
    sample_2x2_joint,
    sample_chain,
)


def gaussian_target(x):
    return -0.5 * np.sum(x**2, axis=(-2, -1))


def test_acceptance_probability_formula():
    cur = np.array([0.0, 0.0, -1.0, 2.0, 0.0])
    prop = np.array([-0.5, 1.0, -3.0, 2.0, -np.inf])
    want = np.minimum(1.0, np.exp(prop - cur))
    np.testing.assert_allclose(acceptance_probability(cur, prop), want)
    assert acceptance_probability(0.0, np.nan) == 0.0


@pytest.mark.parametrize(
    "kwargs", [dict(length=0), dict(burn_in=10, length=10), dict(thin=0), dict(proposal_sigma=0.0), dict(moves="hmc")]
)
def test_chain_config_validation(kwargs):
    with pytest.raises(ValueError):
        ChainConfig(**kwargs)


def test_kept_count():
    cfg = ChainConfig(length=107, burn_in=7, thin=3)
    res = sample_chain(gaussian_target, np.zeros((1, 1)), cfg)
    assert len(res) == (107 - 7) // 3 == cfg.kept_per_chain


def test_gaussian_moments():
    cfg = ChainConfig(seed=4, length=101_000, burn_in=1_000, proposal_sigma=2.0)
    res = sample_chain(gaussian_target, np.zeros((1, 1)), cfg)
    x = res.samples.ravel()
    assert abs(x.mean()) < 3 * batch_means_se(x)
    assert x.var() == pytest.approx(1.0, rel=0.05)
    assert 0.25 <= res.acceptance_rate <= 0.5


@pytest.mark.parametrize("moves", ["joint", "single"])
def test_same_seed_bit_identical(moves):
    gas = LogGas.ginibre(ExternalField(0.5))
    init = initial_config(5, 2, 0.5, rng=1)
    cfg = ChainConfig(seed=9, length=300, burn_in=100, thin=2, n_chains=3, moves=moves)
    a, b = sample_chain(gas, init, cfg), sample_chain(gas, init, cfg)
    assert a.draws.tobytes() == b.draws.tobytes()
    assert a.acceptance_rate == b.acceptance_rate


def test_init_not_finite():
    with pytest.raises(InitNotFinite):
        sample_chain(LogGas.ginibre(ExternalField(1.0)), np.zeros((2, 1)), ChainConfig(length=10, burn_in=0))


def test_zero_acceptance():
    def spike(x):
        return np.where(np.all(x == 0, axis=(-2, -1)), 0.0, -np.inf)

    with pytest.raises(ZeroAcceptance):
        sample_chain(spike, np.zeros((1, 1)), ChainConfig(length=50, burn_in=0, adapt=False))


def test_two_point_gap_law_against_quadrature():
    # y has density exp(-2(y1^2 + y2^2)) (y1 - y2)^2 for Q = x^2, n = 2
    Q = ExternalField(1.0)
    cfg = ChainConfig(seed=2, length=1_000 + 100 * 10, burn_in=1_000, thin=10, n_chains=200, proposal_sigma=0.5)
    res = sample_chain(LogGas.scaled(Q, 2), initial_config(2, 1, 1.0, rng=3, n_chains=200), cfg)
    gap = np.abs(res.samples[:, 0, 0] - res.samples[:, 1, 0])

    def dens(y2, y1):
        return math.exp(-2 * (y1 * y1 + y2 * y2)) * (y1 - y2) ** 2

    total = dblquad(dens, -8, 8, -8, 8, epsrel=1e-10)[0]
    grid = np.linspace(0.0, 5.0, 101)
    # P(|y1 - y2| <= t) integrating y2 over the strip around y1
    cdf = [dblquad(dens, -8, 8, lambda y1: y1 - t, lambda y1: y1 + t, epsrel=1e-10)[0] / total for t in grid]
    np.testing.assert_allclose(cdf, gammainc(1.5, grid**2), atol=1e-8)
    assert ks_distance_1d(gap, lambda x: np.interp(x, grid, cdf, right=1.0)) < 0.02


def test_single_site_coordinates_exchangeable():
    n = 6
    gas = LogGas.ginibre(ExternalField(0.5))
    cfg = ChainConfig(seed=1, length=2_200, burn_in=200, thin=20, n_chains=50, moves="single")
    res = sample_chain(gas, initial_config(n, 1, 0.5, rng=5, n_chains=50), cfg)
    # per-point means differ only by Monte Carlo noise; chains are independent so their means are i.i.d.
    per_chain = res.draws[..., 0].mean(axis=1)
    means = per_chain.mean(axis=0)
    se = per_chain.std(axis=0, ddof=1) / math.sqrt(per_chain.shape[0])
    assert np.all(np.abs(means - means.mean()) < 4 * se.max())


def test_2x2_alpha_conditional_mean_d1():
    gamma = 1.5
    cfg = ChainConfig(seed=6, length=2_000 + 200 * 10, burn_in=2_000, thin=10, n_chains=200)
    s = sample_2x2_joint(1, gamma, cfg)
    # alpha | Delta is complex Gaussian with E|alpha|^2 = 1 / (gamma |Delta|^2)
    x = np.abs(s.alpha) ** 2 * s.gap**2
    assert x.mean() == pytest.approx(1.0 / gamma, rel=0.05)


def test_2x2_deterministic():
    cfg = ChainConfig(seed=3, length=200, burn_in=50, thin=5, n_chains=4)
    a, b = sample_2x2_joint(3, 1.0, cfg), sample_2x2_joint(3, 1.0, cfg)
    for u, v in [(a.lambda1, b.lambda1), (a.lambda2, b.lambda2), (a.alpha, b.alpha)]:
        assert u.tobytes() == v.tobytes()
    assert len(a) == 4 * 30


def test_ldp_concentration():
    n, Q = 32, ExternalField(0.5)
    init = initial_config(n, 1, 0.5, rng=0, n_chains=50) / math.sqrt(n)
    cfg = ChainConfig(seed=1, length=600, burn_in=400, thin=20, n_chains=50, moves="single", proposal_sigma=0.1)
    res = sample_chain(LogGas.scaled(Q, n), init, cfg)
    assert ldp_concentration(res, Q, math.inf) == 1.0
    assert ldp_concentration(res, Q, 0.5) >= 0.99
    fractions = [ldp_concentration(res, Q, eta, energy_estimate=0.61) for eta in np.linspace(0, 0.05, 11)]
    assert np.all(np.diff(fractions) >= 0)
