import json

import numpy as np
import pytest

from levyhk.harness import (BOUND_IDS, comparability_report, default_t_grid, default_x_grid,
                            divergence_certificate, example_model, f_example1, f_example2,
                            gaussian_detector, mc_crosscheck, verify_equivalence_chain,
                            verify_example, verify_lemma_suite)
from levyhk.model import LevyModel, builtin_model
from levyhk.profiles import make_profile
from levyhk.sampler import SamplerSettings


@pytest.fixture(scope="module")
def cauchy_report():
    return comparability_report(builtin_model("cauchy"), [0.25, 1.0], np.linspace(-8, 8, 17), mc_points=0)


def test_report_invariants(cauchy_report):
    rep = cauchy_report
    assert rep.rows.shape == (2 * 17, 5)
    ratio = rep.rows[:, -1]
    assert rep.ratio_min == pytest.approx(ratio.min()) and rep.ratio_max == pytest.approx(ratio.max())
    np.testing.assert_allclose(rep.rows[:, 2] / rep.rows[:, 3], ratio)
    assert rep.holds and rep.verdict.endswith("(grid-certified)")
    assert rep.c0 >= 1.0
    assert rep.csv_header(1) == ["t", "x", "p", "bound", "ratio"]
    d = json.loads(rep.to_json())
    assert d["bound_id"] == "rho" and d["c0"] == pytest.approx(rep.c0)


def test_cauchy_ratio_at_origin(cauchy_report):
    # p(1, 0) = 1 / pi^2, rho_1(0) = 1 / 4
    row = cauchy_report.rows[(cauchy_report.rows[:, 0] == 1.0) & (cauchy_report.rows[:, 1] == 0.0)][0]
    assert row[-1] == pytest.approx(4 / np.pi ** 2, rel=1e-10)


def test_bound_ids_run():
    m = builtin_model("cauchy")
    for b in BOUND_IDS:
        rep = comparability_report(m, [1.0], [0.5, 2.0, 4.0], bound_id=b, mc_points=0)
        assert np.all(np.isfinite(rep.rows[:, -1]))
    with pytest.raises(ValueError):
        comparability_report(m, [1.0], [1.0], bound_id="nope", mc_points=0)


def test_example_shapes():
    r = np.array([0.0, 0.5, 2.0])
    mn = f_example1(0.5, r)
    pr = f_example1(0.5, r, form="product")
    assert mn[0] == pytest.approx(min(0.5 ** (-1 / 1.5), 0.5 ** -2))
    assert np.isinf(pr[0])
    assert np.all(mn[1:] <= pr[1:] * max(0.5 ** (-1 / 1.5), 0.5 ** -2))
    with pytest.raises(ValueError):
        f_example1(1.0, r, form="sum")
    f2 = f_example2(1.0, np.array([1.0]))
    assert f2[0] == pytest.approx(min(1.0, 1.0 / np.log(2.0) ** 2))


def test_default_grids():
    ts = default_t_grid()
    assert ts[0] == pytest.approx(0.01) and ts[-1] == pytest.approx(10.0) and len(ts) == 16
    x = default_x_grid(builtin_model("cauchy", 2), 1.0, n=8)
    assert x.shape == (32, 2)


def test_example2_holds_on_one_time():
    rep = verify_example("example2", t_grid=[0.5], mc_points=0)
    assert rep.holds and rep.claims["upper"] and rep.claims["lower"]
    assert 0.0 < rep.ratio_min <= rep.ratio_max < np.inf
    assert example_model("example1").profile.params["beta"] == 0.5


def test_mc_crosscheck_agrees_on_cauchy():
    m = builtin_model("cauchy")
    out = mc_crosscheck(m, [(1.0, np.array([0.0])), (1.0, np.array([3.0]))],
                        SamplerSettings(n_samples=200_000, seed=11))
    assert len(out["z"]) == 2 and out["all_agree"]
    assert max(abs(z) for z in out["z"]) <= 4


def test_divergence_certificate_on_log_slow():
    m = LevyModel(make_profile("log-slow", 1))
    _, slope = divergence_certificate(m, 1.0)
    assert slope >= 0.5
    _, slope_c = divergence_certificate(builtin_model("cauchy"), 1.0)
    assert slope_c < 0.5


def test_chain_log_slow_all_fail():
    rep = verify_equivalence_chain(LevyModel(make_profile("log-slow", 1), name="log-slow"), T=1.0)
    assert rep.joint == "all-fail" and rep.consistent and not rep.holds
    assert set(rep.items) == {"a", "b", "c1", "c7", "c6"}
    json.loads(rep.to_json())


def test_lemma_suite_cauchy():
    suite = verify_lemma_suite(builtin_model("cauchy"))
    assert suite.passed, [c for c in suite.checks if not c.passed]
    names = {c.name for c in suite.checks}
    assert {"sandwich", "inverse-sandwich", "h-K-identity", "inverse", "jump-lower-bound"} <= names


def test_rank_one_gaussian_detected():
    m = LevyModel(make_profile("truncated", 2, alpha=1.0, R=1.0), A=[[1.0, 0.0], [0.0, 0.0]])
    verdict, rmin, expected = gaussian_detector(m)
    assert expected == "fails" and verdict == "fails" and rmin < 0.1
    full = m.with_(A=np.eye(2))
    assert gaussian_detector(full)[2] == "holds"
