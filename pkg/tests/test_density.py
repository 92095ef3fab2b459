import warnings

import numpy as np
import pytest
from scipy import stats

from conftest import cauchy_density, stable_constant
from levyhk.density import (InversionSettings, density_at, density_derivative_at, density_grid, invert,
                            sup_density, truncation_radius)
from levyhk.errors import NotIntegrableError
from levyhk.model import Anisotropy, LevyModel, builtin_model, stable_model
from levyhk.profiles import make_profile


@pytest.mark.parametrize("t", [0.25, 1.0, 4.0])
def test_cauchy_1d(cauchy, t):
    x = np.linspace(-20, 20, 101)
    np.testing.assert_allclose(density_at(cauchy, t, x), cauchy_density(t, x), rtol=1e-10)


@pytest.mark.parametrize("d", [2, 3])
def test_cauchy_radial_route(d):
    m = builtin_model("cauchy", d)
    x = np.zeros((7, d))
    x[:, 0] = np.linspace(0, 6, 7)
    res = invert(m, 1.0, x)
    assert res.method == "radial-bessel"
    np.testing.assert_allclose(res.values, cauchy_density(1.0, x, d), rtol=1e-9)


def test_cauchy_tensor_route_matches_closed_form():
    m = builtin_model("cauchy", 2)
    x = np.array([[0.0, 0.0], [1.0, 2.0], [-3.0, 0.5]])
    res = invert(m, 1.0, x, settings=InversionSettings(method="tensor-quadrature"))
    np.testing.assert_allclose(res.values, cauchy_density(1.0, x, 2), rtol=1e-8)


def test_stable_15_against_scipy():
    m = stable_model(1.5)
    t = 0.7
    x = np.linspace(-6, 6, 13)
    scale = (t * stable_constant(1, 1.5)) ** (1 / 1.5)
    ref = stats.levy_stable.pdf(x, 1.5, 0.0, scale=scale)
    np.testing.assert_allclose(density_at(m, t, x), ref, rtol=1e-6)


def test_two_sided_stable_against_scipy():
    p, q, a, t = 1.5, 0.5, 1.5, 1.0
    m = LevyModel(make_profile("stable", 1, alpha=a),
                  anisotropy=Anisotropy("two-sided", {"plus": p, "minus": q}), comp_lower=q, comp_upper=p)
    x = np.linspace(-5, 5, 11)
    scale = (t * (p + q) / 2 * stable_constant(1, a)) ** (1 / a)
    # the compensator 1_{|x|<1} leaves the large-jump mean t (p - q) / (a - 1) in place
    shift = t * (p - q) / (a - 1)
    old = stats.levy_stable.parameterization
    stats.levy_stable.parameterization = "S1"
    try:
        ref = stats.levy_stable.pdf(x - shift, a, (p - q) / (p + q), scale=scale)
    finally:
        stats.levy_stable.parameterization = old
    np.testing.assert_allclose(density_at(m, t, x), ref, rtol=1e-5)


def test_gaussian_1d_and_anisotropic_2d():
    m = LevyModel(make_profile("zero", 1), A=[[0.5]], drift=[0.3])
    x = np.linspace(-4, 4, 9)
    np.testing.assert_allclose(density_at(m, 2.0, x), stats.norm.pdf(x, 0.6, np.sqrt(2.0)), rtol=1e-10)
    A = np.array([[1.0, 0.3], [0.3, 0.5]])
    m2 = LevyModel(make_profile("zero", 2), A=A)
    pts = np.array([[0.0, 0.0], [1.0, -0.5], [2.0, 1.0]])
    ref = stats.multivariate_normal(np.zeros(2), 2 * A).pdf(pts)
    np.testing.assert_allclose(density_at(m2, 1.0, pts), ref, rtol=1e-10)


def test_cauchy_derivatives(cauchy):
    t, s = 1.0, np.pi
    x = np.array([-2.0, 0.5, 3.0])
    d1 = -2 * x * s / np.pi / (s ** 2 + x ** 2) ** 2
    np.testing.assert_allclose(density_derivative_at(cauchy, t, x, (1,)), d1, rtol=1e-8)
    d2 = (2 * s / np.pi) * (3 * x ** 2 - s ** 2) / (s ** 2 + x ** 2) ** 3
    np.testing.assert_allclose(density_derivative_at(cauchy, t, x, (2,)), d2, rtol=1e-8)


def test_density_grid_centering(cauchy):
    m = cauchy.with_(drift=[1.5])
    g = density_grid(m, 2.0, np.array([0.0, 1.0]), centering_mode="plain-drift")
    np.testing.assert_allclose(g.center, [3.0])
    np.testing.assert_allclose(g.values, cauchy_density(2.0, np.array([0.0, 1.0])), rtol=1e-10)


def test_sup_density(cauchy):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        s, x = sup_density(cauchy.with_(drift=[0.5]), 2.0)
    assert s == pytest.approx(1 / (2 * np.pi ** 2), rel=1e-9)
    assert x[0] == pytest.approx(1.0, abs=1e-4)


def test_truncation_certificate_bounds_error(cauchy):
    Z, tail, mass = truncation_radius(cauchy, 1.0)
    assert tail <= 1e-13 * mass
    assert np.exp(-np.pi * Z) / np.pi <= 1e-12


def test_not_integrable_reported():
    m = LevyModel(make_profile("log-slow", 1))
    with pytest.raises(NotIntegrableError):
        density_at(m, 1.0, 0.0)


def test_settings_validation():
    with pytest.raises(ValueError):
        InversionSettings(tail_epsilon=1e-3)
    with pytest.raises(ValueError):
        InversionSettings(rel_tol=1e-14)
    with pytest.raises(ValueError):
        InversionSettings(method="fft")
    with pytest.raises(ValueError):
        invert(builtin_model("cauchy"), 1.0, 0.0, beta=(5,))


def test_anisotropic_2d_reflection():
    # reversing the anisotropy direction reflects the density
    m = builtin_model("cauchy", 2)
    mk = lambda e: m.with_(anisotropy=Anisotropy("cosine", {"eps": 0.5, "direction": e}),
                          comp_lower=0.5, comp_upper=1.5)
    st = InversionSettings(rel_tol=1e-7, tail_epsilon=1e-9)
    x = np.array([[1.0, 0.5]])
    a = density_at(mk([1.0, 0.0]), 1.0, x, st)
    b = density_at(mk([-1.0, 0.0]), 1.0, -x, st)
    np.testing.assert_allclose(a, b, rtol=1e-6)
    assert a[0] > 0
