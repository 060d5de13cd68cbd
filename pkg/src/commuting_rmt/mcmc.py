"""Random-walk Metropolis samplers for eigenvalue configurations.

Targets are vectorized callables mapping point arrays of shape
(chains, n, d) to log-densities of shape (chains,). Several independent
chains advance in lockstep; each is an ordinary Metropolis chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .densities import ExternalField, k_n_batch
from .errors import InitNotFinite, ZeroAcceptance
from .tuples import EigenConfig

TARGET_ACCEPT = (0.25, 0.40)
ADAPT_WINDOW = 50
MIN_ACCEPT = 1e-3


@dataclass(frozen=True)
class ChainConfig:
    """Settings for a Metropolis run.

    ``length`` counts steps including burn-in; a step is one joint proposal,
    or one sweep over all points when ``moves == "single"``. The proposal
    scale adapts only during burn-in.
    """

    seed: int = 0
    length: int = 10_000
    burn_in: int = 1_000
    thin: int = 1
    proposal_sigma: float = 0.5
    adapt: bool = True
    n_chains: int = 1
    moves: str = "joint"

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("length must be positive")
        if not 0 <= self.burn_in < self.length:
            raise ValueError("need 0 <= burn_in < length")
        if self.thin < 1:
            raise ValueError("thin must be at least 1")
        if not self.proposal_sigma > 0:
            raise ValueError("proposal_sigma must be positive")
        if self.n_chains < 1:
            raise ValueError("n_chains must be positive")
        if self.moves not in ("joint", "single"):
            raise ValueError(f"unknown move type {self.moves!r}")

    @property
    def kept_per_chain(self) -> int:
        return (self.length - self.burn_in) // self.thin


@dataclass(frozen=True)
class ChainResult:
    """Post-burn-in draws, shape (n_chains, kept, n, d)."""

    draws: np.ndarray
    acceptance_rate: float
    final_sigma: float

    @property
    def samples(self) -> np.ndarray:
        """All draws pooled across chains, shape (n_chains * kept, n, d)."""
        return self.draws.reshape(-1, *self.draws.shape[2:])

    def configs(self) -> list[EigenConfig]:
        return [EigenConfig(p) for p in self.samples]

    def __len__(self) -> int:
        return self.samples.shape[0]


def acceptance_probability(log_current, log_proposed) -> np.ndarray:
    """Metropolis acceptance min(1, exp(log_proposed - log_current)).

    Non-finite proposals (coincident points, singular targets) get 0.
    """
    log_current = np.asarray(log_current, dtype=float)
    log_proposed = np.asarray(log_proposed, dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        diff = np.minimum(log_proposed - log_current, 0.0)
        prob = np.exp(diff)
    return np.where(np.isfinite(log_proposed), prob, 0.0)


def _adapt(sigma: float, rate: float) -> float:
    lo, hi = TARGET_ACCEPT
    if rate < lo:
        return sigma * (0.6 if rate < 0.5 * lo else 0.8)
    if rate > hi:
        return sigma * (1.6 if rate > 0.5 * (1 + hi) else 1.25)
    return sigma


def initial_config(n: int, d: int, gamma: float, rng=None, n_chains: int | None = None) -> np.ndarray:
    """I.i.d. Gaussian points with standard deviation (2 gamma)^(-1/2)."""
    rng = np.random.default_rng(rng)
    shape = (n, d) if n_chains is None else (n_chains, n, d)
    return rng.standard_normal(shape) / math.sqrt(2.0 * gamma)


def _noise(rng, shape, complex_state: bool) -> np.ndarray:
    if complex_state:
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return rng.standard_normal(shape)


def sample_chain(
    target: Callable[[np.ndarray], np.ndarray],
    init,
    cfg: ChainConfig,
) -> ChainResult:
    """Random-walk Metropolis on all real coordinates of a configuration.

    ``init`` is an EigenConfig or an array of shape (n, d) or
    (n_chains, n, d). Complex configurations move their real and imaginary
    parts independently. With ``cfg.moves == "single"`` each step sweeps the
    points one at a time, using ``target.site_delta`` when available.
    """
    rng = np.random.default_rng(cfg.seed)
    x = np.array(init.points if isinstance(init, EigenConfig) else init)
    if x.ndim == 2:
        x = np.broadcast_to(x, (cfg.n_chains, *x.shape)).copy()
    if x.shape[0] != cfg.n_chains:
        raise ValueError(f"init has {x.shape[0]} chains, config asks for {cfg.n_chains}")
    complex_state = np.iscomplexobj(x)
    lp = np.asarray(target(x), dtype=float)
    if not np.all(np.isfinite(lp)):
        raise InitNotFinite("target is not finite at the initial configuration")

    chains, n, d = x.shape
    sigma = cfg.proposal_sigma
    kept = cfg.kept_per_chain
    draws = np.empty((chains, kept, n, d), dtype=x.dtype)
    window_acc = window_tot = 0
    post_acc = post_tot = 0
    site_delta = getattr(target, "site_delta", None)

    for step in range(cfg.length):
        if cfg.moves == "joint":
            prop = x + sigma * _noise(rng, x.shape, complex_state)
            lp_prop = np.asarray(target(prop), dtype=float)
            accept = rng.random(chains) < acceptance_probability(lp, lp_prop)
            x[accept] = prop[accept]
            lp[accept] = lp_prop[accept]
            n_acc, n_tot = int(accept.sum()), chains
        else:
            n_acc, n_tot = 0, chains * n
            for i in range(n):
                new = x[:, i, :] + sigma * _noise(rng, (chains, d), complex_state)
                if site_delta is not None:
                    delta = site_delta(x, i, new)
                    lp_prop = lp + delta
                else:
                    prop = x.copy()
                    prop[:, i, :] = new
                    lp_prop = np.asarray(target(prop), dtype=float)
                accept = rng.random(chains) < acceptance_probability(lp, lp_prop)
                x[accept, i, :] = new[accept]
                lp[accept] = lp_prop[accept]
                n_acc += int(accept.sum())

        if step < cfg.burn_in:
            window_acc += n_acc
            window_tot += n_tot
            if cfg.adapt and (step + 1) % ADAPT_WINDOW == 0:
                sigma = _adapt(sigma, window_acc / window_tot)
                window_acc = window_tot = 0
            continue
        post_acc += n_acc
        post_tot += n_tot
        offset = step - cfg.burn_in + 1
        if offset % cfg.thin == 0 and offset // cfg.thin <= kept:
            draws[:, offset // cfg.thin - 1] = x

    rate = post_acc / post_tot
    if rate < MIN_ACCEPT:
        raise ZeroAcceptance(f"post-burn-in acceptance {rate:.2e} is below {MIN_ACCEPT}")
    return ChainResult(draws, rate, sigma)


@dataclass(frozen=True)
class Joint2x2Samples:
    """Draws of (lambda1, lambda2, alpha) for commuting 2 x 2 tuples."""

    lambda1: np.ndarray
    lambda2: np.ndarray
    alpha: np.ndarray
    acceptance_rate: float
    final_sigma: float
    final_sigma_alpha: float

    def __len__(self) -> int:
        return self.alpha.shape[0]

    def __iter__(self):
        return iter(zip(self.lambda1, self.lambda2, self.alpha))

    @property
    def gap(self) -> np.ndarray:
        """|lambda2 - lambda1| for every draw."""
        return np.sqrt(np.sum(np.abs(self.lambda2 - self.lambda1) ** 2, axis=-1))


def log_joint_2x2(lambda1, lambda2, alpha, d: int, gamma: float) -> np.ndarray:
    """Unnormalized log-density of eigenvalues and unipotent parameter alpha.

    exp(-gamma(|l1|^2 + |l2|^2)) exp(-gamma |alpha|^2 |D|^2) |D|^4 (1 + 2|alpha|^2)^(d-1),
    D = l2 - l1, with respect to Lebesgue measure on C^(2d+1).
    """
    s2 = np.sum(np.abs(lambda2 - lambda1) ** 2, axis=-1)
    a2 = np.abs(alpha) ** 2
    gauss = -gamma * (np.sum(np.abs(lambda1) ** 2, axis=-1) + np.sum(np.abs(lambda2) ** 2, axis=-1))
    with np.errstate(divide="ignore"):
        return gauss - gamma * a2 * s2 + 2.0 * np.log(s2) + (d - 1) * np.log1p(2.0 * a2)


def sample_2x2_joint(d: int, gamma: float, cfg: ChainConfig) -> Joint2x2Samples:
    """Metropolis-within-Gibbs over (lambda1, lambda2, alpha) in C^(2d+1).

    Two blocks alternate. The eigenvalue block moves the centre (l1 + l2)/2
    with scale sigma and the difference l2 - l1 with scale
    sigma / sqrt(1 + 2|alpha|^2); the alpha block moves alpha with scale
    sigma_alpha / (sqrt(gamma) |l2 - l1|). Each scale depends only on the
    coordinates held fixed during that block, so both proposals stay
    symmetric.
    """
    if d < 1:
        raise ValueError("d must be positive")
    rng = np.random.default_rng(cfg.seed)
    chains = cfg.n_chains
    scale = 1.0 / math.sqrt(2.0 * gamma)
    center = scale * _noise(rng, (chains, d), True) / math.sqrt(2.0)
    delta = scale * _noise(rng, (chains, d), True)
    alpha = _noise(rng, (chains,), True) / math.sqrt(2.0)

    def logp(c, dl, a):
        return log_joint_2x2(c - 0.5 * dl, c + 0.5 * dl, a, d, gamma)

    lp = logp(center, delta, alpha)
    if not np.all(np.isfinite(lp)):
        raise InitNotFinite("initial 2x2 configuration has zero density")

    sigma = cfg.proposal_sigma
    sigma_a = cfg.proposal_sigma
    kept = cfg.kept_per_chain
    out_c = np.empty((chains, kept, d), dtype=complex)
    out_d = np.empty((chains, kept, d), dtype=complex)
    out_a = np.empty((chains, kept), dtype=complex)
    w_acc = np.zeros(2)
    w_tot = 0
    post_acc = 0
    post_tot = 0

    for step in range(cfg.length):
        # eigenvalue block
        shrink = 1.0 / np.sqrt(1.0 + 2.0 * np.abs(alpha) ** 2)
        c_prop = center + sigma * _noise(rng, center.shape, True)
        d_prop = delta + (sigma * shrink)[:, None] * _noise(rng, delta.shape, True)
        lp_prop = logp(c_prop, d_prop, alpha)
        acc1 = rng.random(chains) < acceptance_probability(lp, lp_prop)
        center[acc1] = c_prop[acc1]
        delta[acc1] = d_prop[acc1]
        lp[acc1] = lp_prop[acc1]

        # alpha block
        gap = np.sqrt(np.sum(np.abs(delta) ** 2, axis=-1))
        a_prop = alpha + sigma_a / (math.sqrt(gamma) * gap) * _noise(rng, alpha.shape, True)
        lp_prop = logp(center, delta, a_prop)
        acc2 = rng.random(chains) < acceptance_probability(lp, lp_prop)
        alpha[acc2] = a_prop[acc2]
        lp[acc2] = lp_prop[acc2]

        if step < cfg.burn_in:
            w_acc += (acc1.sum(), acc2.sum())
            w_tot += chains
            if cfg.adapt and (step + 1) % ADAPT_WINDOW == 0:
                sigma = _adapt(sigma, w_acc[0] / w_tot)
                sigma_a = _adapt(sigma_a, w_acc[1] / w_tot)
                w_acc[:] = 0
                w_tot = 0
            continue
        post_acc += int(acc1.sum() + acc2.sum())
        post_tot += 2 * chains
        offset = step - cfg.burn_in + 1
        if offset % cfg.thin == 0 and offset // cfg.thin <= kept:
            k = offset // cfg.thin - 1
            out_c[:, k] = center
            out_d[:, k] = delta
            out_a[:, k] = alpha

    rate = post_acc / post_tot
    if rate < MIN_ACCEPT:
        raise ZeroAcceptance(f"post-burn-in acceptance {rate:.2e} is below {MIN_ACCEPT}")
    c = out_c.reshape(-1, d)
    dl = out_d.reshape(-1, d)
    return Joint2x2Samples(c - 0.5 * dl, c + 0.5 * dl, out_a.ravel(), rate, sigma, sigma_a)


def ldp_concentration(chain, Q: ExternalField, eta: float, energy_estimate: float | None = None) -> float:
    """Fraction of sampled configurations with K_n(y)/n^2 <= E + eta.

    ``chain`` is a ChainResult (or an array of configurations) drawn from the
    rescaled density. ``energy_estimate`` defaults to the minimum of K_n/n^2
    found by the particle minimizer at the chain's n.
    """
    samples = chain.samples if isinstance(chain, ChainResult) else np.asarray(chain)
    if math.isinf(eta) and eta > 0:
        return 1.0
    n, d = samples.shape[-2:]
    if energy_estimate is None:
        from .equilibrium import minimize_energy

        energy_estimate = minimize_energy(n, d, Q, functional="k_n").energy
    k = k_n_batch(samples, Q) / n**2
    return float(np.mean(k <= energy_estimate + eta))


def batch_means_se(x: np.ndarray, batches: int = 50) -> float:
    """Standard error of the mean of a correlated series by batch means."""
    x = np.asarray(x, dtype=float).ravel()
    m = len(x) // batches
    means = x[: m * batches].reshape(batches, m).mean(axis=1)
    return float(means.std(ddof=1) / math.sqrt(batches))
