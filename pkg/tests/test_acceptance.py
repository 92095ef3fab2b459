"""Acceptance criteria, one test per criterion.

Each test prints ``CRITERION n: PASS|FAIL ...`` and adds the line to the
terminal summary.
"""
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, cauchy_density
from levyhk.bound import BoundFunctionContext, integral_bounds, integrate_rho, r0_bracket, solve_r0
from levyhk.characteristics import characteristics
from levyhk.conditions import estimate_scaling
from levyhk.density import density_at
from levyhk.harness import (comparability_report, gaussian_lower_bound, verify_equivalence_chain,
                            verify_example)
from levyhk.model import BUILTINS, LevyModel, builtin_model, sphere_area, stable_model
from levyhk.profiles import make_profile
from levyhk.quadrature import integrate
from levyhk.sampler import SamplerSettings, empirical_density, sample_increments

TS = (0.01, 0.1, 1.0, 10.0)
NAMES = sorted(BUILTINS)


def report(n, ok, elapsed, limit, detail):
    ok = bool(ok and elapsed < limit)
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'} {detail}; {elapsed:.1f}s (limit {limit:g}s)"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_01_cauchy_closed_form():
    t0 = time.perf_counter()
    m = builtin_model("cauchy")
    x = np.linspace(-20, 20, 101)
    err = 0.0
    for t in (0.25, 1.0, 4.0):
        ref = cauchy_density(t, x)
        err = max(err, float(np.max(np.abs(density_at(m, t, x) / ref - 1))))
    report(1, err <= 1e-6, time.perf_counter() - t0, 10, f"sup rel err {err:.2e} (tol 1e-6)")


def test_criterion_02_sandwich():
    t0 = time.perf_counter()
    r = np.geomspace(1e-3, 1e3, 20)
    worst = np.inf
    for name in NAMES:
        for d in (1, 2):
            ch = characteristics(builtin_model(name, d))
            q = ch.psi_star(r) / ch.h(1.0 / r)
            lo = 1.0 / (8.0 * (1 + 2 * d))
            worst = min(worst, float(np.min(q / lo - 1)), float(np.min(2.0 / q - 1)))
    report(2, worst >= -1e-8, time.perf_counter() - t0, 30,
           f"min relative slack {worst:.3g} over {len(NAMES)} builtins, d in (1, 2), 20 radii")


def test_criterion_03_h_K_identity():
    t0 = time.perf_counter()
    worst = 0.0
    for name in NAMES:
        ch = characteristics(builtin_model(name))
        for a, b in ((1e-3, 1.0), (0.1, 10.0), (1.0, 1e3)):
            res = integrate(lambda u: 2.0 * ch.K(np.exp(u)), np.log(a), np.log(b), rtol=1e-12)
            ha, hb = ch.h(np.array([a, b]))
            worst = max(worst, abs(ha - hb - res.value) / ha)
    report(3, worst <= 1e-8, time.perf_counter() - t0, 10, f"max |h(a)-h(b)-int 2K/r| / h(a) = {worst:.2e}")


def test_criterion_04_integral_of_rho():
    t0 = time.perf_counter()
    ok = True
    for d in (1, 2):
        lo, hi = integral_bounds(d)
        assert lo == pytest.approx(sphere_area(d) / 2) and hi == pytest.approx(sphere_area(d) / 2 * (1 + 2 / d))
        for name in NAMES:
            m = builtin_model(name, d)
            for t in TS:
                v = integrate_rho(BoundFunctionContext(m, t))
                ok &= lo * (1 - 1e-10) <= v <= hi * (1 + 1e-10)
    c = integrate_rho(BoundFunctionContext(builtin_model("cauchy"), 1.0))
    err = abs(c - 2 * np.sqrt(2))
    report(4, ok and err <= 1e-8, time.perf_counter() - t0, 20,
           f"all integrals inside bounds: {ok}; Cauchy value {c:.12f} (|err| {err:.1e})")


def test_criterion_05_crossover_radius():
    t0 = time.perf_counter()
    ok = True
    for name in NAMES:
        m = builtin_model(name)
        for t in TS:
            ctx = BoundFunctionContext(m, t)
            a, b = r0_bracket(ctx)
            ok &= a * (1 - 1e-12) <= solve_r0(ctx) <= b * (1 + 1e-12)
    r0 = solve_r0(BoundFunctionContext(builtin_model("cauchy"), 0.25))
    err = abs(r0 - np.sqrt(0.5))
    report(5, ok and err <= 1e-10, time.perf_counter() - t0, 10,
           f"r0 inside [h^-1(3/t), h^-1(1/t)]: {ok}; Cauchy t=0.25 r0 = {r0:.14f} (|err| {err:.1e})")


def test_criterion_06_equivalence_chain():
    t0 = time.perf_counter()
    good = verify_equivalence_chain(builtin_model("cauchy"))
    wa = good.items["a"].witness
    bad = verify_equivalence_chain(LevyModel(make_profile("log-slow", 1), name="log-slow"), T=1.0)
    ok = (good.joint == "all-hold" and abs(wa - 2.0) <= 1e-9 and bad.items["a"].verdict == "fails"
          and bad.items["b"].verdict == "fails" and bad.consistent)
    report(6, ok, time.perf_counter() - t0, 120,
           f"Cauchy {good.joint}, (a) witness {wa:.12f}; log-slow (a) {bad.items['a'].verdict}, "
           f"(b) {bad.items['b'].verdict}, joint {bad.joint}")


def test_criterion_07_example_one():
    t0 = time.perf_counter()
    r1 = verify_example("example1", refine=1, mc_points=0)
    r2 = verify_example("example1", refine=2, mc_points=0)
    stable = abs(r2.c0 / r1.c0 - 1) <= 0.2
    ok = np.isfinite(r1.ratio_max) and r1.ratio_min > 0 and np.isfinite(r2.ratio_max) and r2.ratio_min > 0
    report(7, ok and stable, time.perf_counter() - t0, 300,
           f"ratio in [{r1.ratio_min:.4g}, {r1.ratio_max:.4g}], c0 {r1.c0:.4g} -> {r2.c0:.4g} under x2 refinement")


def test_criterion_08_off_diagonal_lower_bound():
    t0 = time.perf_counter()
    m = builtin_model("cauchy")
    t = 0.25
    H = float(characteristics(m).h_inv(np.array([4.0]))[0])
    g = np.geomspace(2 * H, 16.0, 40)
    rep = comparability_report(m, [t], np.concatenate([-g[::-1], g, [4.0]]), bound_id="nu-tail",
                               center_mode="plain-drift", mc_points=0)
    row = rep.rows[(rep.rows[:, 1] == 4.0)][0]
    s = np.pi * t
    closed = (s / np.pi / (s ** 2 + 16.0)) / (t / 16.0)
    at4 = float(row[-1])
    ok = rep.ratio_min >= 0.5 and abs(at4 - 0.961) <= 1e-3
    report(8, ok, time.perf_counter() - t0, 60,
           f"min ratio {rep.ratio_min:.4f} (need >= 0.5); at x=4 {at4:.10f}, closed form {closed:.10f}, "
           f"target 0.961 +- 1e-3")


def test_criterion_09_monte_carlo():
    t0 = time.perf_counter()
    m = builtin_model("cauchy")
    s = SamplerSettings(n_samples=100_000, seed=2024)
    ys = sample_increments(m, 1.0, s)
    same = np.array_equal(ys, sample_increments(m, 1.0, s))
    edges = np.linspace(-20, 20, 201)
    emp = empirical_density(ys, edges)
    # bin averages of the inverted density by Simpson's rule
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = np.concatenate([edges[:-1], mid, edges[1:]])
    p = density_at(m, 1.0, pts).reshape(3, -1)
    avg = (p[0] + 4 * p[1] + p[2]) / 6
    se = emp.density_error
    within = np.abs(emp.density - avg) <= 4 * np.maximum(se, 1e-300)
    frac = float(within.mean())
    report(9, frac >= 0.95 and same, time.perf_counter() - t0, 60,
           f"{frac:.1%} of 200 bins within 4 SE; deterministic: {same}")


def test_criterion_10_gaussian_lower_bound():
    t0 = time.perf_counter()
    m = LevyModel(make_profile("truncated", 1, alpha=1.0, R=1.0), A=[[1.0]], name="gauss+truncated")
    c, per = gaussian_lower_bound(m, ts=(0.1, 1.0))
    report(10, c > 0, time.perf_counter() - t0, 60,
           f"c_tilde {c:.4f} (t=0.1: {per[0]:.4f}, t=1: {per[1]:.4f})")


def test_criterion_11_scaling_estimator():
    t0 = time.perf_counter()
    ok, parts = True, []
    for a in (0.5, 1.0, 1.5):
        est = estimate_scaling(stable_model(a))
        ok &= abs(est.exponent - a) <= 0.05 and 1.0 <= est.constant <= 1.05 + 1e-12
        parts.append(f"alpha {a}: {est.exponent:.6f}/{est.constant:.6f}")
    report(11, ok, time.perf_counter() - t0, 10, "; ".join(parts))
