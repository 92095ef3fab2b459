import numpy as np
import pytest
from scipy import integrate as si
from scipy.special import gamma

from conftest import stable_constant
from levyhk.characteristics import (characteristics, compute_drift_br, compute_h, compute_K,
                                    compute_psi, compute_psi_star, invert_h, invert_psi_star)
from levyhk.errors import NotInvertibleError
from levyhk.model import Anisotropy, LevyModel, builtin_model, sphere_area, stable_model
from levyhk.profiles import make_profile

R = np.geomspace(1e-4, 1e4, 17)


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_stable_h_and_K_closed_form(d, alpha):
    m = stable_model(alpha, d)
    w = sphere_area(d)
    np.testing.assert_allclose(compute_h(m, R), w * R ** -alpha * (1 / (2 - alpha) + 1 / alpha), rtol=1e-10)
    np.testing.assert_allclose(compute_K(m, R), w * R ** -alpha / (2 - alpha), rtol=1e-10)


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_stable_psi_closed_form(d, alpha):
    m = stable_model(alpha, d)
    c = stable_constant(d, alpha)
    s = np.geomspace(1e-3, 1e3, 13)
    z = np.zeros((len(s), d))
    z[:, 0] = s
    np.testing.assert_allclose(compute_psi(m, z).real, c * s ** alpha, rtol=1e-9)
    np.testing.assert_allclose(compute_psi_star(m, s), c * s ** alpha, rtol=1e-9)
    np.testing.assert_allclose(invert_psi_star(m, c * s ** alpha), s, rtol=1e-8)


def test_cauchy_values_at_one(cauchy):
    assert compute_h(cauchy, np.array([1.0]))[0] == pytest.approx(4.0, rel=1e-14)
    assert compute_K(cauchy, np.array([1.0]))[0] == pytest.approx(2.0, rel=1e-14)
    assert compute_psi_star(cauchy, np.array([1.0]))[0] == pytest.approx(np.pi, rel=1e-12)


def test_gaussian_part_adds_norm_over_r2():
    m = stable_model(1.0, 2, A=[[2.0, 0.0], [0.0, 0.5]])
    base = stable_model(1.0, 2)
    np.testing.assert_allclose(compute_h(m, R) - compute_h(base, R), 2.0 / R ** 2, rtol=1e-10)
    z = np.array([[0.0, 3.0]])
    assert compute_psi(m, z).real[0] == pytest.approx(compute_psi(base, z).real[0] + 0.5 * 9.0, rel=1e-12)


def test_tempered_psi_closed_form():
    m = builtin_model("tempered")
    a, lam = 1.5, 1.0
    for s in (0.3, 2.0, 15.0):
        ref = 2 * gamma(-a) * (lam ** a - (lam ** 2 + s ** 2) ** (a / 2) * np.cos(a * np.arctan(s / lam)))
        z = np.array([[s]])
        assert compute_psi(m, z, exact=True).real[0] == pytest.approx(ref, rel=1e-12)
        # spline tables carry interpolation error
        assert compute_psi(m, z).real[0] == pytest.approx(ref, rel=3e-8)


def test_inverse_round_trip(builtin):
    # log-heavy h decays like 1/log r: levels below ~0.01 need r > e^700
    u = np.geomspace(0.1, 1e3, 15)
    r = invert_h(builtin, u)
    np.testing.assert_allclose(compute_h(builtin, r), u, rtol=1e-10)
    assert np.all(np.diff(r) < 0)


def test_inverse_outside_range_raises():
    # a finite measure has h(0+) < inf
    m = LevyModel(make_profile("custom", 1, func=lambda r: np.exp(-r)))
    with pytest.raises(NotInvertibleError):
        characteristics(m).h_inv(1e6)


def test_drift_br_two_sided():
    p, q, a = 1.5, 0.5, 1.5
    m = LevyModel(make_profile("stable", 1, alpha=a), drift=[0.3],
                  anisotropy=Anisotropy("two-sided", {"plus": p, "minus": q}), comp_lower=q, comp_upper=p)
    r = np.array([0.01, 1.0, 100.0])
    # b_r = b + int x (1_{|x|<r} - 1_{|x|<1}) n(x) dx
    expect = 0.3 + (p - q) * (r ** (1 - a) - 1) / (1 - a)
    np.testing.assert_allclose(compute_drift_br(m, r)[:, 0], expect, rtol=1e-10)


def test_symmetric_drift_br_is_constant(cauchy):
    m = cauchy.with_(drift=[0.7])
    np.testing.assert_allclose(compute_drift_br(m, R)[:, 0], 0.7)


def test_two_sided_psi_against_quad():
    p, q, a = 1.5, 0.5, 1.5
    m = LevyModel(make_profile("stable", 1, alpha=a),
                  anisotropy=Anisotropy("two-sided", {"plus": p, "minus": q}), comp_lower=q, comp_upper=p)
    s = 1.7
    c1 = np.pi / (2 * gamma(1 + a) * np.sin(np.pi * a / 2))
    re = (p + q) * c1 * s ** a
    odd = si.quad(lambda x: (np.sin(s * x) - s * x) * x ** (-1 - a), 0, 1, epsrel=1e-13)[0] \
        + si.quad(lambda x: x ** (-1 - a), 1, np.inf, weight="sin", wvar=s)[0]
    psi = compute_psi(m, np.array([[s]]), exact=True)[0]
    assert psi.real == pytest.approx(re, rel=1e-11)
    # E exp(i z Y_1) = exp(-Psi(z)) with Psi = int (1 - e^{izx} + izx 1_{|x|<1}) n
    assert psi.imag == pytest.approx(-(p - q) * odd, rel=1e-8)


def test_anisotropic_psi_matches_dense_direction_sum():
    a = 1.5
    an = Anisotropy("cosine", {"eps": 0.5, "direction": [1.0, 0.0]})
    m = LevyModel(make_profile("stable", 2, alpha=a), anisotropy=an, comp_lower=0.5, comp_upper=1.5)
    c1 = np.pi / (2 * gamma(1 + a) * np.sin(np.pi * a / 2))  # int_0^inf (1 - cos u) u^(-1-a) du
    n = 20000
    ang = (np.arange(n) + 0.5) * 2 * np.pi / n
    th = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    wts = an(th) * 2 * np.pi / n
    z = np.array([[1.0, 0.0], [0.3, -2.0], [-5.0, 4.0]])
    ref = np.abs(z @ th.T) ** a @ wts * c1
    np.testing.assert_allclose(compute_psi(m, z).real, ref, rtol=1e-7)


def test_constant_anisotropy_scales_psi():
    m = stable_model(1.0, 2)
    m2 = m.with_(anisotropy=Anisotropy("constant", {"value": 2.0}), comp_lower=2.0, comp_upper=2.0)
    z = np.array([[0.5, 0.5], [3.0, -1.0]])
    np.testing.assert_allclose(compute_psi(m2, z).real, 2 * compute_psi(m, z).real, rtol=1e-12)


def test_psi_conjugate_symmetry():
    an = Anisotropy("cosine", {"eps": 0.5, "direction": [1.0, 1.0]})
    m = LevyModel(make_profile("stable", 2, alpha=1.5), anisotropy=an, comp_lower=0.5, comp_upper=1.5)
    z = np.array([[0.4, 1.1], [2.0, -0.3]])
    np.testing.assert_allclose(compute_psi(m, -z), np.conj(compute_psi(m, z)), rtol=1e-12)
    assert np.all(np.abs(compute_psi(m, z).imag) > 0)


def test_radial_tables_monotone(builtin):
    tabs = characteristics(builtin).radial_tables()
    for tab in tabs.values() if isinstance(tabs, dict) else tabs:
        assert tab.is_monotone()
