import json
import warnings

import numpy as np
import pytest

from levyhk.errors import (CompoundPoissonWarning, DivergentLevyIntegralError, InvalidParameterError,
                           NonMonotoneTableError)
from levyhk.model import (Anisotropy, BUILTINS, LevyModel, builtin_model, load_model, sphere_area,
                          sphere_directions, validate_levy_measure)
from levyhk.profiles import KINDS, check_monotone, make_profile


def test_sphere_area():
    assert sphere_area(1) == pytest.approx(2.0)
    assert sphere_area(2) == pytest.approx(2 * np.pi)
    assert sphere_area(3) == pytest.approx(4 * np.pi)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_sphere_directions_integrate_constants_and_quadratics(d):
    th, w = sphere_directions(d)
    assert w.sum() == pytest.approx(sphere_area(d), rel=1e-12)
    np.testing.assert_allclose(np.linalg.norm(th, axis=1), 1.0, rtol=1e-14)
    second = (th * w[:, None]).T @ th
    # d = 3 uses a Fibonacci lattice: quasi-uniform, not an exact cubature
    np.testing.assert_allclose(second, sphere_area(d) / d * np.eye(d), atol=1e-10 if d < 3 else 0.1)


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_builtins_are_levy_measures_and_not_compound_poisson(name):
    m = builtin_model(name)
    with warnings.catch_warnings():
        warnings.simplefilter("error", CompoundPoissonWarning)
        rep = validate_levy_measure(m)
    assert np.isfinite(rep.levy_integral) and not rep.compound_poisson


def test_cauchy_levy_integral_closed_form():
    # int (1 ∧ x^2) x^-2 dx over R = 4
    assert validate_levy_measure(builtin_model("cauchy")).levy_integral == pytest.approx(4.0, rel=1e-10)


def test_divergent_measure_rejected():
    prof = make_profile("custom", 1, func=lambda r: r ** -3.5)
    with pytest.raises(DivergentLevyIntegralError):
        validate_levy_measure(LevyModel(prof))


def test_compound_poisson_warns():
    prof = make_profile("custom", 1, func=lambda r: np.exp(-r))
    with pytest.warns(CompoundPoissonWarning):
        rep = validate_levy_measure(LevyModel(prof))
    assert rep.total_mass == pytest.approx(2.0, rel=1e-8)


@pytest.mark.parametrize("alpha", [0.0, 2.0, -1.0])
def test_alpha_range(alpha):
    with pytest.raises(InvalidParameterError):
        make_profile("stable", 1, alpha=alpha)


def test_table_profile_monotone_check():
    with pytest.raises(NonMonotoneTableError):
        make_profile("table", 1, pairs=[[0.1, 5.0], [1.0, 6.0], [2.0, 1.0]])
    r = np.geomspace(1e-3, 1e3, 40)
    prof = make_profile("table", 1, pairs=np.column_stack([r, r ** -2.0]))
    np.testing.assert_allclose(prof(np.array([0.5, 7.0])), [4.0, 1 / 49.0], rtol=1e-10)


def test_custom_non_monotone_rejected():
    with pytest.raises(InvalidParameterError):
        make_profile("custom", 1, func=lambda r: r ** -2 * (2 + np.sin(r)))


@pytest.mark.parametrize("kind, params", [("stable", {"alpha": 1.2}), ("stable-mixture", {"alpha": 1.5, "beta": 0.5}),
                                          ("tempered", {"alpha": 1.5, "lam": 1.0}),
                                          ("truncated", {"alpha": 1.0, "R": 1.0}),
                                          ("log-heavy", {"alpha": 1.0}), ("log-slow", {})])
def test_profiles_non_increasing(kind, params):
    assert kind in KINDS
    check_monotone(make_profile(kind, 2, **params))


def test_model_validation():
    prof = make_profile("stable", 2, alpha=1.0)
    with pytest.raises(InvalidParameterError):
        LevyModel(prof, A=[[1.0, 0.0], [0.5, 1.0]])
    with pytest.raises(InvalidParameterError):
        LevyModel(prof, A=[[-1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(InvalidParameterError):
        LevyModel(prof, drift=[1.0])
    with pytest.raises(InvalidParameterError):
        LevyModel(prof, anisotropy=Anisotropy("cosine", {"eps": 0.5, "direction": [1, 0]}),
                  comp_lower=0.9, comp_upper=1.1)


def test_json_round_trip():
    m = LevyModel(make_profile("stable", 2, alpha=1.3), A=[[1.0, 0.2], [0.2, 0.5]], drift=[0.1, -0.2],
                  anisotropy=Anisotropy("cosine", {"eps": 0.5, "direction": [1, 0]}),
                  comp_lower=0.5, comp_upper=1.5, name="demo")
    m2 = LevyModel.from_json(m.to_json())
    assert m2.to_dict() == m.to_dict()
    assert not m2.symmetric
    x = np.array([[0.3, -0.7], [2.0, 1.0]])
    np.testing.assert_allclose(m2.n(x), m.n(x))


def test_symmetric_flag_contradiction():
    spec = {"dim": 1, "profile": {"kind": "stable", "alpha": 1.0},
            "anisotropy": {"kind": "two-sided", "plus": 1.0, "minus": 0.5},
            "comp_lower": 0.5, "comp_upper": 1.0, "symmetric": True}
    with pytest.raises(InvalidParameterError):
        LevyModel.from_dict(spec)


def test_load_model_accepts_builtin_json_text_and_file(tmp_path):
    spec = {"dim": 1, "A": [[0.0]], "drift": [0.0], "profile": {"kind": "stable", "alpha": 1.0},
            "comp_lower": 1.0, "comp_upper": 1.0, "symmetric": True}
    f = tmp_path / "m.json"
    f.write_text(json.dumps(spec))
    for src in ("cauchy", json.dumps(spec), str(f), spec):
        m = load_model(src)
        assert m.profile.params["alpha"] == 1.0


def test_minorant_is_symmetric_min():
    m = LevyModel(make_profile("stable", 1, alpha=1.0),
                  anisotropy=Anisotropy("two-sided", {"plus": 1.5, "minus": 0.5}),
                  comp_lower=0.5, comp_upper=1.5)
    s = m.minorant()
    x = np.array([[0.7], [-0.7]])
    np.testing.assert_allclose(s(x), 0.5 * 0.7 ** -2)
    sm = s.as_model()
    assert sm.symmetric
    np.testing.assert_allclose(sm.n(x), s(x))
