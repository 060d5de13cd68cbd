import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from commuting_rmt.densities import ExternalField, k_n_functional
from commuting_rmt.equilibrium import (
    EquilibriumLaw,
    LawKind,
    _energy_and_grad,
    axis_projection,
    discrete_energy,
    equilibrium_radius,
    ks_distance_1d,
    law_cdf_1d,
    minimize_energy,
    projected_cdf,
    sample_equilibrium,
)
from commuting_rmt.errors import CoincidentPoints, EmptySamples, UnsupportedAlpha


def test_discrete_energy_two_points():
    val = discrete_energy(np.array([[-1.0], [1.0]]), ExternalField(0.5))
    assert val == pytest.approx(-math.log(2) / 2 + 0.5, abs=1e-15)


def test_discrete_energy_single_point():
    Q = ExternalField(1.7)
    assert discrete_energy(np.array([[0.3, -0.4]]), Q) == pytest.approx(1.7 * 0.25)


def test_discrete_energy_coincident():
    with pytest.raises(CoincidentPoints):
        discrete_energy(np.array([[1.0], [1.0]]), ExternalField(1.0))


@settings(max_examples=50, deadline=None)
@given(n=st.integers(1, 10), d=st.integers(1, 5), gamma=st.floats(0.1, 5.0), seed=st.integers(0, 2**32 - 1))
def test_discrete_energy_k_n_identity(n, d, gamma, seed):
    pts = np.random.default_rng(seed).standard_normal((n, d))
    Q = ExternalField(gamma)
    want = k_n_functional(pts, Q) / n**2 + float(np.sum(Q(pts))) / n**2
    assert discrete_energy(pts, Q) == pytest.approx(want, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("alpha", [2.0, 3.0])
def test_energy_gradient_matches_finite_differences(alpha):
    rng = np.random.default_rng(0)
    pts = rng.standard_normal((7, 3))
    Q = ExternalField(0.8, alpha)
    _, grad = _energy_and_grad(pts, Q, 1 / 7)
    eps = 1e-6
    num = np.zeros_like(pts)
    for idx in np.ndindex(*pts.shape):
        e = np.zeros_like(pts)
        e[idx] = eps
        num[idx] = (_energy_and_grad(pts + e, Q, 1 / 7)[0] - _energy_and_grad(pts - e, Q, 1 / 7)[0]) / (2 * eps)
    np.testing.assert_allclose(grad, num, rtol=1e-6, atol=1e-9)


def test_two_point_minimizers():
    Q = ExternalField(0.5)
    kn = minimize_energy(2, 1, Q, functional="k_n").config.points[:, 0]
    assert abs(abs(kn[1] - kn[0]) - 2.0) < 1e-6
    assert kn.sum() == pytest.approx(0.0, abs=1e-6)
    # with the 1/n field weight the optimum of -(1/2) log(2t) + t^2/2 is t = 1/sqrt(2)
    en = minimize_energy(2, 1, Q).config.points[:, 0]
    assert abs(abs(en[1] - en[0]) - math.sqrt(2)) < 1e-6


def test_minimizer_energy_converges_monotonically():
    Q = ExternalField(0.5)
    energies = [minimize_energy(n, 1, Q, tol=1e-7).energy for n in (25, 50, 100, 200)]
    # the diagonal-free discrete energy approaches E^Q = 3/4 from below
    gaps = 0.75 - np.array(energies)
    assert np.all(gaps > 0)
    assert np.all(np.diff(gaps) < 0)


def test_minimizer_energy_independent_of_seed():
    Q = ExternalField(1.0)
    a = minimize_energy(30, 2, Q, seed=0, tol=1e-9)
    b = minimize_energy(30, 2, Q, seed=123, tol=1e-9)
    assert a.converged and b.converged
    assert a.energy == pytest.approx(b.energy, abs=1e-8)


def test_minimizer_reports_nonconvergence():
    rep = minimize_energy(50, 2, ExternalField(1.0), max_iter=3, restarts=1)
    assert not rep.converged
    assert rep.iterations == 3


def test_minimizer_d1_support():
    rep = minimize_energy(100, 1, ExternalField(0.5))
    assert np.abs(rep.config.points).max() <= 2.0 * 1.05


def test_general_alpha_sphere_radius():
    gamma, alpha = 0.5, 4.0
    rep = minimize_energy(100, 5, ExternalField(gamma, alpha), tol=1e-7)
    radii = np.linalg.norm(rep.config.points, axis=1)
    assert np.all(np.abs(radii / equilibrium_radius(5, gamma, alpha) - 1) < 0.02)


@pytest.mark.parametrize("d, gamma, R", [(1, 0.5, 2.0), (3, 0.5, math.sqrt(4 / 3)), (9, 0.5, 1.0), (2, 1.0, 1.0)])
def test_equilibrium_radius_values(d, gamma, R):
    assert equilibrium_radius(d, gamma) == pytest.approx(R, rel=1e-15)


def test_radius_ordering():
    for gamma in (0.1, 0.5, 1.0, 3.0):
        radii = [equilibrium_radius(d, gamma) for d in range(1, 5)]
        assert radii[0] > radii[1] > radii[2] > radii[3]
    for d in range(1, 8):
        vals = [equilibrium_radius(d, g) for g in np.linspace(0.1, 5, 20)]
        assert np.all(np.diff(vals) <= 0)


def test_unsupported_alpha():
    with pytest.raises(UnsupportedAlpha):
        equilibrium_radius(2, 1.0, alpha=4.0)


def test_law_kinds():
    assert [EquilibriumLaw.gaussian(d, 1.0).kind for d in (1, 2, 3, 4, 7)] == [
        LawKind.SEMICIRCLE,
        LawKind.UNIFORM_DISK,
        LawKind.BALL_LAW,
        LawKind.SPHERE_UNIFORM,
        LawKind.SPHERE_UNIFORM,
    ]


@pytest.mark.parametrize("d", [2, 3])
def test_radial_density_mass(d):
    law = EquilibriumLaw.gaussian(d, 0.7)
    assert quad(law.radial_density, 0, law.radius, limit=200)[0] == pytest.approx(1.0, abs=1e-8)


def test_sphere_samples_on_sphere():
    x = sample_equilibrium(EquilibriumLaw.gaussian(6, 0.5), 1000, seed=0)
    np.testing.assert_allclose(np.linalg.norm(x, axis=1), 1.0, atol=1e-12)


def _moment_ok(values, target):
    se = values.std(ddof=1) / math.sqrt(len(values))
    return abs(values.mean() - target) < 3 * se


def test_disk_second_moment():
    law = EquilibriumLaw.gaussian(2, 1.0)
    x = sample_equilibrium(law, 100_000, seed=1)
    assert _moment_ok(np.sum(x**2, axis=1), law.radius**2 / 2)


def test_semicircle_second_moment():
    law = EquilibriumLaw.gaussian(1, 0.5)
    x = sample_equilibrium(law, 100_000, seed=2)
    assert _moment_ok(x[:, 0] ** 2, law.radius**2 / 4)


def test_ball_second_moment_against_quadrature():
    law = EquilibriumLaw.gaussian(3, 1.0)
    x = sample_equilibrium(law, 100_000, seed=3)
    want = quad(lambda r: r * r * law.radial_density(r), 0, law.radius, limit=200)[0]
    assert _moment_ok(np.sum(x**2, axis=1), want)


def test_ks_distance_examples():
    cdf = law_cdf_1d(EquilibriumLaw.gaussian(1, 0.5))
    assert ks_distance_1d([0.0], cdf) == pytest.approx(0.5)
    assert ks_distance_1d([-10.0, -9.0], cdf) == pytest.approx(1.0)
    with pytest.raises(EmptySamples):
        ks_distance_1d([], cdf)


def test_ks_null():
    law = EquilibriumLaw.gaussian(1, 0.5)
    x = sample_equilibrium(law, 10_000, seed=4)[:, 0]
    assert ks_distance_1d(x, law_cdf_1d(law)) < 0.02


def test_axis_projection():
    np.testing.assert_array_equal(axis_projection(np.array([[1, 2], [3, 4]])), [1, 3])


def test_projected_cdf_matches_semicircle():
    x = np.linspace(-2.5, 2.5, 501)
    np.testing.assert_allclose(projected_cdf(1, 0.5)(x), law_cdf_1d(EquilibriumLaw.gaussian(1, 0.5))(x), atol=1e-9)


@pytest.mark.parametrize("d", [3, 5])
def test_projection_of_samples(d):
    law = EquilibriumLaw.gaussian(d, 0.5)
    x = axis_projection(sample_equilibrium(law, 100_000, seed=d))
    assert ks_distance_1d(x, projected_cdf(d, 0.5)) < 0.03
