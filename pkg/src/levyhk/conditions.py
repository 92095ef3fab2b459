"""Grid checkers for scaling and equivalence conditions.

Every condition is tested on a finite grid. A verdict is ``holds`` when the
smallest admissible constant stabilizes towards the relevant limit (``r -> 0``
for small-scale conditions, ``r -> inf`` for large-scale ones, likewise in
``t``), ``fails`` when it keeps growing decade after decade, and
``inconclusive`` otherwise or when a violation is within twice the numeric
tolerance. Conditions:

* ``A1``-``A4``: scaling of ``h`` at the origin and its equivalent forms
  (inverse, ``Psi*`` at infinity, ``h <= c K``);
* ``B1``-``B4``: the same at infinity;
* ``C2``, ``C5``, ``D2``: bounds on ``int |z|^m exp(-t Re Psi)`` against
  ``[h^-1(1/t)]^(-d-m)`` for small (``C``) and large (``D``) times;
* ``C4``, ``D4``: ``Psi*(|x|) <= c`` times the directional quadratic form;
* ``prof-i``, ``prof-ii``, ``prof-iii``: the profile conditions
  ``c r^-d K0(r) <= nu0(r)``, lower scaling of ``K0`` and of ``nu0``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .characteristics import characteristics
from .density import InversionSettings, truncation_radius
from .errors import LevyHKError, NotIntegrableError, WindowTooNarrowError
from .model import sphere_area, sphere_directions
from .quadrature import integrate

REGIMES = ("lower-at-zero", "upper-at-zero", "lower-at-infinity")
CONDITIONS = ("A1", "A2", "A3", "A4", "B1", "B2", "B3", "B4", "C2", "C4", "C5", "D2", "D4",
              "prof-i", "prof-ii", "prof-iii")
LAMBDAS = np.array([1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2])
SCALING_LAMBDAS = 10.0 ** (-np.arange(1, 17) / 8.0)  # two decades, 8 per decade
PER_DECADE = 32
STEP_GROWTH = 0.02  # per-decade growth of a constant read as a trend
TOTAL_GROWTH = 1.5  # growth over the window needed to call a divergence
NUM_TOL = 1e-8


@dataclass
class ScalingEstimate:
    """Fitted scaling of ``h`` on a window.

    Attributes
    ----------
    exponent : float
        Least-squares slope of ``log h`` against ``-log r``.
    constant : float
        Smallest constant on the reference decade (the decade nearest the
        regime's limit): ``C >= 1`` for ``lower-at-zero``, ``c <= 1`` otherwise.
    threshold : float
        Radius up to which (``*-at-zero``) or beyond which (``*-at-infinity``)
        the reference constant holds; the window edge when it holds throughout.
    regime : str
    residual : float
        Largest log-violation of the reference constant over the window
        (``<= 0`` when it holds everywhere).
    window : tuple
    window_constant : float
        Smallest constant over the whole window.
    """

    exponent: float
    constant: float
    threshold: float
    regime: str
    residual: float
    window: tuple
    window_constant: float

    def to_dict(self):
        return {k: (list(v) if isinstance(v, tuple) else float(v) if not isinstance(v, str) else v)
                for k, v in self.__dict__.items()}


@dataclass
class ConditionReport:
    """Verdict and witnesses for one condition.

    Attributes
    ----------
    condition_id : str
    verdict : str
        ``holds``, ``fails`` or ``inconclusive``.
    witness_constant : float
        Smallest constant achieving the inequality on the grid.
    witness_threshold : float
        The range parameter ``T`` the verdict refers to.
    worst_point : float
        Grid location of the tightest (or violating) ratio.
    grid_spec : dict
        Grid description; also carries the exponent used and, for
        inconclusive verdicts, a diagnosis.
    """

    condition_id: str
    verdict: str
    witness_constant: float
    witness_threshold: float
    worst_point: float
    grid_spec: dict = field(default_factory=dict)

    @property
    def holds(self):
        return self.verdict == "holds"

    def to_dict(self):
        def clean(v):
            if isinstance(v, dict):
                return {k: clean(x) for k, x in v.items()}
            if isinstance(v, (list, tuple, np.ndarray)):
                return [clean(x) for x in v]
            if isinstance(v, (np.floating, float)):
                return float(v) if np.isfinite(v) else str(float(v))
            if isinstance(v, np.integer):
                return int(v)
            return v
        return {k: clean(getattr(self, k)) for k in
                ("condition_id", "verdict", "witness_constant", "witness_threshold",
                 "worst_point", "grid_spec")}

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


# ---------------------------------------------------------------- helpers
def _grid(window, per_decade=PER_DECADE):
    lo, hi = float(window[0]), float(window[1])
    if not 0.0 < lo < hi:
        raise ValueError("window must satisfy 0 < lo < hi")
    n = max(2, int(round(np.log10(hi / lo) * per_decade)) + 1)
    return np.geomspace(lo, hi, n)


def _decade_groups(pos, limit):
    # index groups of one decade each, counted from the limit end and ordered
    # from far away towards the limit
    lp = np.log10(np.asarray(pos, dtype=float))
    dist = (lp.max() - lp) if limit == "high" else (lp - lp.min())
    key = np.floor(dist + 1e-9)
    return [np.flatnonzero(key == k) for k in np.unique(key)[::-1]]


def _trend(pos, bad, limit):
    """Verdict from per-point ``bad`` values (larger is worse) along ``pos``."""
    bad = np.asarray(bad, dtype=float)
    if not np.all(np.isfinite(bad)):
        i = int(np.flatnonzero(~np.isfinite(bad))[0])
        return "fails", i
    groups = _decade_groups(pos, limit)
    worst = np.array([bad[g].max() for g in groups])
    i_worst = int(np.argmax(bad))
    if len(worst) < 2:
        return "holds", i_worst
    steps = worst[1:] / worst[:-1]
    if steps[-1] <= 1.0 + STEP_GROWTH:
        return "holds", i_worst
    if len(steps) >= 2 and np.all(steps[-2:] > 1.0 + STEP_GROWTH) and worst[-1] >= TOTAL_GROWTH * worst[0]:
        g = groups[-1]
        return "fails", int(g[np.argmax(bad[g])])
    return "inconclusive", i_worst


def _combine(*verdicts):
    if "fails" in verdicts:
        return "fails"
    if "inconclusive" in verdicts:
        return "inconclusive"
    return "holds"


def _spec(kind, values, limit, **extra):
    values = np.asarray(values, dtype=float)
    out = {"variable": kind, "min": float(values.min()), "max": float(values.max()),
           "n": int(len(values)), "per_decade": PER_DECADE, "limit": limit}
    out.update(extra)
    return out


def _limit_decade(pos, limit):
    return _decade_groups(pos, limit)[-1]


def _effective_exponent(f, r, lams, upward):
    # s(r, lam) with f(lam r) = lam^-s f(r) (lam < 1) or f(r) = lam^s f(lam r) (lam > 1)
    fr = f(r)
    out = np.empty((len(r), len(lams)))
    for j, lam in enumerate(lams):
        out[:, j] = np.log(f(lam * r) / fr) / -np.log(lam) if not upward else \
            np.log(fr / f(lam * r)) / np.log(lam)
    return out


# --------------------------------------------------------- scaling of h
def estimate_scaling(model, regime="lower-at-zero", window=(1e-4, 1e-1), lam_decades=2,
                     lam_per_decade=8):
    """Fit ``h(r) ~ r^-alpha`` on ``window`` and measure the scaling constant.

    Parameters
    ----------
    model : LevyModel
    regime : str
        ``lower-at-zero``: ``h(r) <= C lam^a h(lam r)``, ``lam <= 1``;
        ``upper-at-zero``: ``c lam^a h(lam r) <= h(r)``, ``lam <= 1``;
        ``lower-at-infinity``: ``c lam^a h(lam r) <= h(r)``, ``lam >= 1``.
    window : (float, float)
        Radii; must span at least one decade.

    Raises
    ------
    WindowTooNarrowError
    """
    if regime not in REGIMES:
        raise ValueError(f"regime must be one of {REGIMES}")
    lo, hi = float(window[0]), float(window[1])
    if not 0.0 < lo < hi or np.log10(hi / lo) < 1.0 - 1e-12:
        raise WindowTooNarrowError(f"window [{lo:g}, {hi:g}] spans less than one decade")
    ch = characteristics(model)
    r = _grid((lo, hi))
    lh = np.log(ch.h(r))
    alpha = float(-np.polyfit(np.log(r), lh, 1)[0])
    k = np.arange(1, lam_decades * lam_per_decade + 1)
    lams = 10.0 ** (-k / lam_per_decade)
    if regime == "lower-at-infinity":
        lams = 1.0 / lams
    # log of h(r) / (lam^a h(lam r)) on the (r, lam) grid
    lh_lam = np.log(ch.h((r[:, None] * lams[None, :]).ravel())).reshape(len(r), len(lams))
    lratio = lh[:, None] - alpha * np.log(lams)[None, :] - lh_lam
    upper = regime == "lower-at-zero"
    per_r = lratio.max(axis=1) if upper else lratio.min(axis=1)
    per_r = np.maximum(per_r, 0.0) if upper else np.minimum(per_r, 0.0)  # lam = 1 is admissible
    limit = "high" if regime == "lower-at-infinity" else "low"
    ref = _limit_decade(r, limit)
    if upper:
        c_ref = float(per_r[ref].max())
        viol = per_r - c_ref
        window_c = float(np.exp(per_r.max()))
    else:
        c_ref = float(per_r[ref].min())
        viol = c_ref - per_r
        window_c = float(np.exp(per_r.min()))
    bad = viol > 1e-12
    if limit == "low":
        threshold = float(r[np.argmax(bad)]) if bad.any() else hi
    else:
        threshold = float(r[len(r) - 1 - np.argmax(bad[::-1])]) if bad.any() else lo
    return ScalingEstimate(alpha, float(np.exp(c_ref)), threshold, regime, float(viol.max()),
                           (lo, hi), window_c)


# ----------------------------------------------------- frequency integrals
def exp_re_psi_integral(model, t, power=0, tail_epsilon=1e-10):
    """``int |z|^power exp(-t Re Psi(z)) dz`` with an error bound.

    Radial integration in ``log |z|`` up to the certified cutoff of
    :func:`levyhk.density.truncation_radius`; anisotropic models average over
    the model's direction set.

    Raises
    ------
    NotIntegrableError
        If the integral diverges (no certified cutoff exists).
    """
    ch = characteristics(model)
    d = model.dim
    p = float(power)
    Z, tail, _ = truncation_radius(model, t, power, InversionSettings(tail_epsilon=tail_epsilon))
    s0 = 1.0 / float(ch.h_inv(np.array([1.0 / t]))[0])
    v0 = np.log(min(s0, Z)) - 40.0
    if d == 1 or model.isotropic:
        e1 = np.zeros(d)
        e1[0] = 1.0
        dirs, w = e1[None, :], np.array([2.0 if d == 1 else sphere_area(d)])
    else:
        dirs, w = sphere_directions(d)

    def f(v):
        rho = np.exp(v)
        re = ch.re_psi(rho[:, None, None] * dirs[None, :, :])
        with np.errstate(under="ignore", over="ignore"):
            return np.exp((p + d) * v[:, None] - t * re) @ w

    head = float(w.sum()) * np.exp((p + d) * v0) / (p + d)
    res = integrate(f, v0, np.log(Z), rtol=1e-10, max_intervals=8000)
    return head + res.value, res.error + tail


# -------------------------------------------------------------- checkers
def _report(cid, verdict, witness, threshold, worst, spec):
    return ConditionReport(cid, verdict, float(witness), float(threshold), float(worst), spec)


def _check_a1(ch, r, limit, upward):
    """Scaling of ``h`` with ``lam`` in LAMBDAS (``upward``: ``lam`` in 1/LAMBDAS)."""
    lams = 1.0 / SCALING_LAMBDAS if upward else SCALING_LAMBDAS
    s = _effective_exponent(ch.h, r, lams, upward)
    alpha = float(min(2.0, s[_limit_decade(r, limit)].min()))
    if upward:
        # c lam^a h(lam r) <= h(r): c = min h(r) / (lam^a h(lam r))
        ratio = np.exp((s - alpha) * np.log(lams)[None, :]).min(axis=1)
        bad = 1.0 / np.minimum(ratio, 1.0)
    else:
        # h(r) <= C lam^a h(lam r): C = max h(r) / (lam^a h(lam r))
        ratio = np.exp((alpha - s) * np.log(1.0 / lams)[None, :]).max(axis=1)
        bad = np.maximum(ratio, 1.0)
    smin = s.min(axis=1)
    v1, i1 = _trend(r, bad, limit)
    v2, _ = _trend(r, 1.0 / np.maximum(smin, 1e-300), limit)
    if alpha <= NUM_TOL:
        v2 = "inconclusive" if alpha > -2 * NUM_TOL else "fails"
    return v1, v2, alpha, bad, i1


def check_condition(model, condition_id, params=None):
    """Grid check of one condition.

    Parameters
    ----------
    model : LevyModel
    condition_id : str
        One of :data:`CONDITIONS`.
    params : dict, optional
        ``window`` (radii, frequencies or times depending on the condition),
        ``m`` (moment for ``C5``, default 1).

    Returns
    -------
    ConditionReport
    """
    if condition_id not in CONDITIONS:
        raise ValueError(f"condition_id must be one of {CONDITIONS}")
    params = dict(params or {})
    ch = characteristics(model)
    d = model.dim
    cid = condition_id

    if cid in ("A1", "A2", "A4", "B1", "B2", "B4"):
        small = cid[0] == "A"
        window = params.get("window", (1e-6, 1.0) if small else (1.0, 1e6))
        r = _grid(window)
        limit = "low" if small else "high"
        T = window[1] if small else window[0]
        if cid.endswith("4"):
            bad = ch.h(r) / ch.K(r)
            verdict, i = _trend(r, bad, limit)
            return _report(cid, verdict, bad.max(), T, r[int(np.argmax(bad))],
                           _spec("r", r, limit))
        v1, v2, alpha, bad, i = _check_a1(ch, r, limit, upward=not small)
        verdict = _combine(v1, v2)
        witness = bad.max() if small else 1.0 / bad.max()
        if cid.endswith("1"):
            return _report(cid, verdict, witness, T, r[i],
                           _spec("r", r, limit, lambdas="10^(-k/8), k=1..16" if small
                                 else "10^(k/8), k=1..16", exponent=alpha))
        # inverse form on u = h(r), lam in {2, 10} (A2) or {1/2, 1/10} (B2)
        u = ch.h(r)
        lams = np.array([2.0, 10.0]) if small else np.array([0.5, 0.1])
        hin = ch.h_inv(u)
        q = np.stack([(hin / ch.h_inv(lam * u)) ** alpha / lam for lam in lams], axis=1)
        if small:
            need = q.max(axis=1)
            bad2 = np.maximum(need, 1.0)
            wit = float(need.max())
            excess = wit / witness
        else:
            need = q.min(axis=1)
            bad2 = 1.0 / np.minimum(need, 1.0)
            wit = float(need.min())
            excess = witness / wit
        v2, j = _trend(r, bad2, limit)
        return _report(cid, _combine(verdict, v2), wit, T, r[j],
                       _spec("r", r, limit, lambdas=lams.tolist(), exponent=alpha,
                             forward_constant=float(witness), excess_over_forward=float(excess)))

    if cid in ("A3", "B3"):
        # Psi* at large (A3) or small (B3) frequencies, exponent from A1/B1 on 1/r
        big = cid == "A3"
        window = params.get("window", (1.0, 1e6) if big else (1e-6, 1.0))
        rz = _grid(window)
        rr = np.sort(1.0 / rz)
        _, v_exp, alpha, _, _ = _check_a1(ch, rr, "low" if big else "high", upward=not big)
        lams = 1.0 / LAMBDAS if big else LAMBDAS
        ps = ch.psi_star(rz)
        q = np.stack([ch.psi_star(lam * rz) / (lam ** alpha * ps) for lam in lams], axis=1)
        limit = "high" if big else "low"
        if big:
            c = q.min(axis=1)
            bad = 1.0 / np.minimum(c, 1.0)
            wit = float(c.min())
        else:
            c = q.max(axis=1)
            bad = np.maximum(c, 1.0)
            wit = float(c.max())
        verdict, i = _trend(rz, bad, limit)
        verdict = _combine(verdict, v_exp)
        T = 1.0 / window[0] if big else 1.0 / window[1]
        return _report(cid, verdict, wit, T, rz[i],
                       _spec("frequency", rz, limit, lambdas=lams.tolist(), exponent=alpha))

    if cid in ("C2", "C5", "D2"):
        small = cid != "D2"
        window = params.get("window", (1e-3, 1.0) if small else (1.0, 1e3))
        m = int(params.get("m", 1)) if cid == "C5" else 0
        ts = np.geomspace(window[0], window[1],
                          max(2, int(round(np.log10(window[1] / window[0]) * 5)) + 1))
        limit = "low" if small else "high"
        vals = np.full(len(ts), np.nan)
        diag = []
        for k, t in enumerate(ts):
            try:
                I, _ = exp_re_psi_integral(model, t, m)
                vals[k] = I * float(ch.h_inv(np.array([1.0 / t]))[0]) ** (d + m)
            except (NotIntegrableError, LevyHKError) as exc:
                diag.append(f"t={t:.4g}: {exc}")
        spec = _spec("t", ts, limit, moment=m)
        T = window[1] if small else window[0]
        if np.isnan(vals).any():
            spec["diagnosis"] = "; ".join(diag)
            ok = ~np.isnan(vals)
            wit = float(np.nanmax(vals)) if ok.any() else float("inf")
            worst = ts[int(np.flatnonzero(~ok)[0])]
            return _report(cid, "inconclusive", wit, T, worst, spec)
        verdict, i = _trend(ts, vals, limit)
        return _report(cid, verdict, vals.max(), T, ts[i], spec)

    if cid in ("C4", "D4"):
        big = cid == "C4"
        window = params.get("window", (1.0, 1e6) if big else (1e-6, 1.0))
        rx = _grid(window)
        limit = "high" if big else "low"
        if d == 1:
            dirs = np.array([[1.0], [-1.0]])
        else:
            dirs = sphere_directions(d)[0]
        pts = rx[:, None, None] * dirs[None, :, :]
        ratio = (ch.psi_star(rx)[:, None] / ch.directional_K(pts)).max(axis=1)
        verdict, i = _trend(rx, ratio, limit)
        spec = _spec("|x|", rx, limit, directions=int(len(dirs)))
        if not big:
            # a priori integrability of exp(-t0 Psi) for some t0
            ok = False
            for t0 in (1.0, 10.0, 100.0):
                try:
                    truncation_radius(model, t0, 0, InversionSettings(tail_epsilon=1e-6))
                    ok = True
                    spec["integrable_at"] = t0
                    break
                except LevyHKError:
                    continue
            if not ok:
                spec["diagnosis"] = "exp(-t Psi) not integrable for t in {1, 10, 100}"
                verdict = "inconclusive" if verdict == "holds" else verdict
        T = 1.0 / window[0] if big else 1.0 / window[1]
        return _report(cid, verdict, ratio.max(), T, rx[i], spec)

    # profile conditions on nu0 and K0 = K of the isotropic profile measure
    base = characteristics(model.isotropic_part())
    prof = model.profile
    window = params.get("window", (1e-6, 0.5))
    r = _grid(window)
    limit = "low"
    T = window[1]
    if cid == "prof-i":
        with np.errstate(divide="ignore"):
            c1 = prof(r) * r ** d / base.K(r)
            bad = 1.0 / c1
        verdict, i = _trend(r, bad, limit)
        return _report(cid, verdict, float(np.min(c1)), T, r[int(np.argmin(c1))], _spec("r", r, limit))
    if cid == "prof-ii":
        s = _effective_exponent(base.K, r, LAMBDAS, upward=False).max(axis=1)
        beta = float(max(0.0, s.max()))
        verdict, i = _trend(r, 1.0 / np.maximum(2.0 - s, 1e-300), limit)
        if beta >= 2.0 - 2 * NUM_TOL:
            verdict = "inconclusive" if beta < 2.0 + 2 * NUM_TOL else "fails"
        return _report(cid, verdict, 1.0, T, r[int(np.argmax(s))],
                       _spec("r", r, limit, lambdas=LAMBDAS.tolist(), exponent=beta))
    # prof-iii
    with np.errstate(divide="ignore", invalid="ignore"):
        s = _effective_exponent(prof, r, LAMBDAS, upward=False).max(axis=1) - d
    if not np.all(np.isfinite(s)):
        i = int(np.flatnonzero(~np.isfinite(s))[0])
        return _report(cid, "fails", 1.0, T, r[i],
                       _spec("r", r, limit, lambdas=LAMBDAS.tolist(), exponent=float("inf")))
    beta = float(max(0.0, s.max()))
    verdict, i = _trend(r, 1.0 / np.maximum(2.0 - s, 1e-300), limit)
    if beta >= 2.0 - 2 * NUM_TOL:
        verdict = "inconclusive" if beta < 2.0 + 2 * NUM_TOL else "fails"
    return _report(cid, verdict, 1.0, T, r[int(np.argmax(s))],
                   _spec("r", r, limit, lambdas=LAMBDAS.tolist(), exponent=beta))
