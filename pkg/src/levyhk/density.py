"""Transition densities by Fourier inversion of ``exp(-t Psi)``.

The density of ``Y_t`` is

    p(t, x) = (2 pi)^-d int exp(-i <x, z>) exp(-t Psi(z)) dz.

Three routes are implemented:

* ``d = 1``: ``p = pi^-1 int_0^inf exp(-t Re Psi) cos(x z + t Im Psi) dz``;
* isotropic ``d >= 2`` with ``A`` a multiple of the identity: a radial
  (Hankel-type) integral against ``Lambda_d(|x| rho) rho^(d-1)``;
* anisotropic ``d = 2, 3``: Kronrod tensor panels over a half box.

The frequency range is truncated at a radius ``Z`` where a certified bound on
the discarded mass falls below ``tail_epsilon`` times the integral of
``exp(-t Psi*)``; the bound uses ``Re Psi(z) >= (1 - cos 1) K_z`` with ``K_z``
the directional truncated second moment. Panels are graded geometrically
towards ``z = 0`` and uniform elsewhere, with widths tied to the oscillation
frequency; each panel carries a Kronrod/Gauss error estimate and the uniform
panels are halved until the estimate meets ``rel_tol``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .characteristics import characteristics
from .errors import (MaxOnBoundaryWarning, NotIntegrableError, OscillationBudgetError,
                     QuadratureError)
from ._fourier import bessel_lambda
from .model import LevyModel, sphere_area, sphere_directions
from .quadrature import NODES15, WG7, WK15, integrate

_C1 = 1.0 - np.cos(1.0)
_V_MAX = 300.0
TENSOR_WIDTH = 4.0  # initial tensor panel width in units of min(s0, pi/omega)
TENSOR_FLOOR = 1e-4  # innermost graded edge relative to min(Z, s0)
METHODS = ("auto", "cosine", "radial-bessel", "tensor-quadrature")


@dataclass(frozen=True)
class InversionSettings:
    """Tolerances and budgets for Fourier inversion.

    Attributes
    ----------
    tail_epsilon : float
        Allowed discarded frequency mass relative to ``int exp(-t Psi*)``;
        in ``(0, 1e-6]``.
    panel_budget : int
        Maximum number of panels per axis.
    rel_tol : float
        Target relative error of the panel sum, at least ``1e-12``.
    method : str
        ``auto`` picks ``cosine`` (``d = 1``), ``radial-bessel`` (isotropic)
        or ``tensor-quadrature`` (anisotropic, ``d <= 3``).
    """

    tail_epsilon: float = 1e-13
    panel_budget: int = 100_000
    rel_tol: float = 1e-10
    method: str = "auto"

    def __post_init__(self):
        if not 0.0 < self.tail_epsilon <= 1e-6:
            raise ValueError("tail_epsilon must lie in (0, 1e-6]")
        if not self.rel_tol >= 1e-12:
            raise ValueError("rel_tol must be at least 1e-12")
        if self.panel_budget < 1:
            raise ValueError("panel_budget must be positive")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")


@dataclass
class DensityGrid:
    """Densities on a set of points.

    Attributes
    ----------
    t : float
    points : ndarray, shape (n, d)
        Absolute positions.
    values : ndarray, shape (n,)
    center : ndarray, shape (d,)
        Drift centering used to place ``points`` (zero when none).
    errors : ndarray, shape (n,)
        Panel error estimates.
    """

    t: float
    points: np.ndarray
    values: np.ndarray
    center: np.ndarray
    errors: np.ndarray = field(default=None)


@dataclass
class InversionResult:
    """Values with diagnostics from one inversion call."""

    values: np.ndarray
    errors: np.ndarray
    imag_residual: float
    cutoff: float
    n_panels: int
    method: str


# ------------------------------------------------------------ truncation
def _lower_re_psi(model, rho):
    """Radial lower bound on ``Re Psi`` over the sphere of radius ``rho``.

    ``1 - cos y >= (1 - cos 1) y^2`` for ``|y| <= 1`` and
    ``{|x| < 1/|z|}`` lies inside ``{|<z, x>| < 1}``, so
    ``Re Psi(z) >= (1 - cos 1) (lam_min(A) |z|^2 + c M2(1/|z|) |z|^2 / d)``
    with ``c = 1`` for ``d = 1`` (where ``M2`` already carries the anisotropy)
    and ``c = comp_lower`` against the profile measure otherwise.
    """
    d = model.dim
    rho = np.asarray(rho, dtype=float)
    lam = float(np.linalg.eigvalsh(model.A).min())
    if d == 1:
        jump = characteristics(model).second_moment(1.0 / rho) * rho ** 2
    else:
        base = characteristics(model.isotropic_part())
        jump = model.comp_lower * base.second_moment(1.0 / rho) * rho ** 2 / d
    return _C1 * (jump + lam * rho ** 2)


def _frequency_scale(model, t):
    return 1.0 / float(characteristics(model).h_inv(np.array([1.0 / t]))[0])


def truncation_radius(model, t, power=0, settings=InversionSettings()):
    """Cutoff ``Z`` with certified discarded mass below ``tail_epsilon``.

    Returns
    -------
    Z, tail_bound, scale : float
        The cutoff, the bound on ``int_{|z|>Z} |z|^power |e^{-t Psi}|`` and
        the reference mass ``int_{|z|<Z} |z|^power exp(-t Psi*(|z|))``.

    Raises
    ------
    NotIntegrableError
        If no cutoff below ``1e12`` times the natural frequency scale works.
    """
    ch = characteristics(model)
    d = model.dim
    w = sphere_area(d)
    s0 = _frequency_scale(model, t)
    eps = settings.tail_epsilon

    def f_tail(v):
        rho = np.exp(v)
        with np.errstate(over="ignore", under="ignore"):
            return w * np.exp((power + d) * v - t * _lower_re_psi(model, rho))

    # the bound is integrated up to |z| = e^V_MAX; beyond it the integrand
    # must already be negligible
    if f_tail(np.array([_V_MAX]))[0] > 1e-300:
        raise NotIntegrableError(
            f"exp(-t Re Psi) is not negligible at |z| = e^{_V_MAX:g} for t = {t:g}")

    def tail(Z):
        if np.log(Z) >= _V_MAX:
            return 0.0
        try:
            return integrate(f_tail, np.log(Z), _V_MAX, rtol=1e-6, max_intervals=4000).value
        except QuadratureError:
            return np.inf

    def mass(Z):
        def f(v):
            rho = np.exp(v)
            with np.errstate(over="ignore", under="ignore"):
                return w * np.exp((power + d) * v - t * ch.psi_star(rho))
        # below e^-20 s0 the factor exp(-t Psi*) is 1 to working accuracy
        v0 = np.log(s0) - 20.0
        head = w * np.exp((power + d) * v0) / (power + d)
        return head + integrate(f, v0, np.log(Z), rtol=1e-8, max_intervals=4000).value

    Z = s0
    for _ in range(41):
        T = tail(Z)
        M = mass(Z)
        if T <= eps * M:
            break
        Z *= 2.0
    else:
        raise NotIntegrableError(
            f"truncation criterion not met below |z| = {Z:.3g} at t = {t:g}; "
            "the density may not exist at this time")
    # shrink inside the last doubling
    lo, hi = np.log(Z / 2.0), np.log(Z)
    if Z > s0:
        for _ in range(8):
            mid = 0.5 * (lo + hi)
            if tail(np.exp(mid)) <= eps * mass(np.exp(mid)):
                hi = mid
            else:
                lo = mid
    Z1 = float(np.exp(hi))
    T1 = float(tail(Z1))
    # leave room below the certified cutoff for the refined stage
    M0 = mass(s0)
    for _ in range(8):
        if T1 <= 0.01 * eps * M0:
            break
        Z1 *= 1.5
        T1 = float(tail(Z1))
    # second stage: below the certified cutoff use the running minimum (from
    # the right) of Re Psi sampled on a dense log grid and over directions
    v = np.linspace(np.log(s0), np.log(Z1), 64 * max(1, int(np.ceil((np.log(Z1) - np.log(s0)) / np.log(10.0)))) + 1)
    if len(v) > 1 and Z1 > s0:
        rho = np.exp(v)
        m = np.minimum.accumulate(_min_re_psi(model, rho)[::-1])[::-1]
        with np.errstate(under="ignore"):
            g = w * np.exp((power + d) * v - t * m)
        # piecewise bound on each cell [v_i, v_{i+1}]: the running min at the left node
        cell = g[:-1] * np.diff(v) * np.exp((power + d) * np.diff(v))
        cum = np.concatenate([np.cumsum(cell[::-1])[::-1], [0.0]]) + T1
        # certified lower bound on the reference mass at each node (Psi* is
        # non-decreasing, so the right node under-estimates each cell)
        with np.errstate(under="ignore"):
            gs = w * np.exp((power + d) * v[:-1] - t * ch.psi_star(rho[1:]))
        mlow = M0 + np.concatenate([[0.0], np.cumsum(gs * np.diff(v))])
        ok = cum <= eps * mlow
        i = int(np.argmax(ok))
        if ok[i]:
            Z = float(rho[i])
            return Z, float(cum[i]), float(mass(Z))
    return Z1, T1, float(mass(Z1))


def _min_re_psi(model, rho):
    """``min_theta Re Psi(rho theta)`` over the model's direction set."""
    ch = characteristics(model)
    d = model.dim
    if d == 1:
        return np.minimum(ch.re_psi(rho), ch.re_psi(-rho))
    th, _ = sphere_directions(d)
    return ch.re_psi(rho[:, None, None] * th[None, :, :]).min(axis=-1)


# ---------------------------------------------------------------- panels
def _edges(Z, width, z_floor):
    """Geometric edges from ``z_floor`` up to ``width``, then uniform to ``Z``."""
    top = min(width, Z)
    k = max(1, int(np.ceil(np.log2(top / z_floor))))
    geo = top * 2.0 ** -np.arange(k, -1, -1)
    if top >= Z:
        return np.concatenate([[0.0], geo])
    n = int(np.ceil((Z - top) / width))
    return np.concatenate([[0.0], geo, np.linspace(top, Z, n + 1)[1:]])


def _halve_uniform(edges, n_geo):
    geo, uni = edges[:n_geo + 1], edges[n_geo:]
    mids = 0.5 * (uni[:-1] + uni[1:])
    out = np.empty(2 * len(uni) - 1)
    out[0::2] = uni
    out[1::2] = mids
    return np.concatenate([geo[:-1], out])


def _kronrod_nodes(edges):
    a, b = edges[:-1], edges[1:]
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    nodes = (c[:, None] + h[:, None] * NODES15[None, :]).ravel()
    wk = (h[:, None] * WK15[None, :]).ravel()
    wg = (h[:, None] * WG7[None, :]).ravel()
    return nodes, wk, wg


def _phase_rate(model, t, Z, n=2048):
    """Bound on ``|d/dz t Im Psi|`` along axes and diagonals up to ``Z``."""
    if model.symmetric:
        return t * float(np.linalg.norm(model.drift))
    ch = characteristics(model)
    d = model.dim
    s = np.linspace(0.0, Z, n)
    dirs = [np.eye(d)[0]]
    if d > 1:
        dirs += [np.eye(d)[k] for k in range(1, d)] + [np.ones(d) / np.sqrt(d)]
    rate = 0.0
    for e in dirs:
        im = ch.im_psi(s[:, None] * e)
        rate = max(rate, float(np.max(np.abs(np.diff(im))) / (s[1] - s[0])))
    return t * rate


def _budget_check(n_panels, settings):
    if n_panels > settings.panel_budget:
        raise OscillationBudgetError(
            f"inversion needs {n_panels} panels (budget {settings.panel_budget})")


# ------------------------------------------------------------- 1-D route
def _weights_1d(model, t, nodes, beta):
    ch = characteristics(model)
    re = ch.re_psi(nodes)
    im = ch.im_psi(nodes)
    with np.errstate(under="ignore"):
        amp = nodes ** beta * np.exp(-t * re)
    return amp, t * im + 0.5 * np.pi * beta


def _panel_sum(amp, phase, nodes, wk, wg, xs, kernel):
    out = np.empty(len(xs))
    err = np.empty(len(xs))
    for i0 in range(0, len(xs), 32):
        x = xs[i0:i0 + 32]
        vals = amp[None, :] * kernel(x, nodes, phase)
        out[i0:i0 + 32] = vals @ wk
        err[i0:i0 + 32] = np.abs(vals @ (wk - wg))
    return out, err


def _refine_loop(Z, width, z_floor, settings, evaluate, abs_floor):
    edges = _edges(Z, width, z_floor)
    n_geo = int(np.searchsorted(edges, min(width, Z))) - 1
    while True:
        _budget_check(len(edges) - 1, settings)
        vals, err = evaluate(edges)
        tol = settings.rel_tol * np.abs(vals) + abs_floor
        if np.all(err <= tol):
            return vals, err, len(edges) - 1
        if 2 * (len(edges) - 1) > settings.panel_budget:
            raise OscillationBudgetError(
                f"panel error {np.max(err - tol):.3e} above tolerance at budget {settings.panel_budget}")
        edges = _halve_uniform(edges, n_geo)


def _invert_1d(model, t, xs, beta, settings):
    Z, tail, mass = truncation_radius(model, t, beta, settings)
    s0 = _frequency_scale(model, t)
    omega = float(np.max(np.abs(xs))) + _phase_rate(model, t, Z)
    width = min(0.5 * s0, np.pi / omega) if omega > 0 else 0.5 * s0
    z_floor = 1e-16 * min(Z, s0)

    def kernel(x, z, phase):
        return np.cos(x[:, None] * z[None, :] + phase[None, :])

    def evaluate(edges):
        nodes, wk, wg = _kronrod_nodes(edges)
        amp, phase = _weights_1d(model, t, nodes, beta)
        v, e = _panel_sum(amp, phase, nodes, wk, wg, xs, kernel)
        return v / np.pi, e / np.pi

    abs_floor = settings.tail_epsilon * mass / (2.0 * np.pi)
    vals, err, n = _refine_loop(Z, width, z_floor, settings, evaluate, abs_floor)
    return InversionResult(vals, err + tail / (2.0 * np.pi), 0.0, Z, n, "cosine")


# -------------------------------------------------------- radial route
def _radial_ok(model):
    A = model.A
    return model.isotropic and np.allclose(A, A[0, 0] * np.eye(model.dim))


def _invert_radial(model, t, xs, settings):
    d = model.dim
    ch = characteristics(model)
    r = np.linalg.norm(xs - t * model.drift, axis=-1)
    Z, tail, mass = truncation_radius(model, t, 0, settings)
    s0 = _frequency_scale(model, t)
    omega = float(np.max(r))
    width = min(0.5 * s0, np.pi / omega) if omega > 0 else 0.5 * s0
    z_floor = 1e-16 * min(Z, s0)
    e1 = np.zeros(d)
    e1[0] = 1.0
    c = sphere_area(d) / (2.0 * np.pi) ** d

    def kernel(x, z, phase):
        return bessel_lambda(d, x[:, None] * z[None, :])

    def evaluate(edges):
        nodes, wk, wg = _kronrod_nodes(edges)
        re = ch.re_psi(nodes[:, None] * e1)
        with np.errstate(under="ignore"):
            amp = nodes ** (d - 1) * np.exp(-t * re)
        v, e = _panel_sum(amp, None, nodes, wk, wg, r, kernel)
        return c * v, c * e

    abs_floor = settings.tail_epsilon * mass / (2.0 * np.pi) ** d
    vals, err, n = _refine_loop(Z, width, z_floor, settings, evaluate, abs_floor)
    return InversionResult(vals, err + tail / (2.0 * np.pi) ** d, 0.0, Z, n, "radial-bessel")


# -------------------------------------------------------- tensor route
def _invert_tensor(model, t, xs, beta, settings, chunk=100_000):
    d = model.dim
    if d > 3:
        raise ValueError("tensor quadrature is limited to d <= 3")
    ch = characteristics(model)
    bsum = int(sum(beta))
    Z, tail, mass = truncation_radius(model, t, bsum, settings)
    s0 = _frequency_scale(model, t)
    omega = float(np.max(np.abs(xs))) * np.sqrt(d) + _phase_rate(model, t, Z)
    width = TENSOR_WIDTH * (min(s0, np.pi / omega) if omega > 0 else s0)
    z_floor = TENSOR_FLOOR * min(Z, s0)
    norm = 2.0 / (2.0 * np.pi) ** d

    def evaluate(edges):
        half, wk0, wg0 = _kronrod_nodes(edges)
        full = np.concatenate([-half[::-1], half])
        wkf = np.concatenate([wk0[::-1], wk0])
        wgf = np.concatenate([wg0[::-1], wg0])
        # the trailing axes form a fixed sub-grid; axis 0 (z_1 >= 0) is blocked
        rest = np.stack([g.ravel() for g in np.meshgrid(*([full] * (d - 1)), indexing="ij")], axis=-1)
        wk_rest = wkf
        wg_rest = wgf
        for _ in range(d - 2):
            wk_rest = np.multiply.outer(wk_rest, wkf).ravel()
            wg_rest = np.multiply.outer(wg_rest, wgf).ravel()
        beta_f = np.asarray(beta, dtype=float)
        vals = np.zeros(len(xs))
        errs = np.zeros(len(xs))
        resabs = np.zeros(len(xs))
        block = max(1, chunk // len(rest))
        for i0 in range(0, len(half), block):
            z0 = half[i0:i0 + block]
            z = np.concatenate([np.repeat(z0, len(rest))[:, None],
                                np.tile(rest, (len(z0), 1))], axis=1)
            WK = np.multiply.outer(wk0[i0:i0 + block], wk_rest).ravel()
            WG = np.multiply.outer(wg0[i0:i0 + block], wg_rest).ravel()
            re = ch.re_psi(z)
            im = ch.im_psi(z)
            with np.errstate(under="ignore"):
                amp = np.exp(-t * re) * np.prod(z ** beta_f, axis=-1)
            ph = t * im + 0.5 * np.pi * bsum
            f = amp[None, :] * np.cos(xs @ z.T + ph[None, :])
            vals += f @ WK
            errs += f @ (WK - WG)
            resabs += np.abs(f) @ np.abs(WK)
        # QUADPACK scaling of the Kronrod/Gauss difference
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.where(resabs > 0, np.minimum(1.0, (200.0 * np.abs(errs) / resabs) ** 1.5), 1.0)
        return norm * vals, norm * resabs * scale

    abs_floor = settings.tail_epsilon * mass / (2.0 * np.pi) ** d
    vals, err, n = _refine_loop(Z, width, z_floor, settings, evaluate, abs_floor)
    return InversionResult(vals, err + tail / (2.0 * np.pi) ** d, 0.0, Z, n, "tensor-quadrature")


# ------------------------------------------------------------ public API
def _points(model, x):
    x = np.asarray(x, dtype=float)
    d = model.dim
    if d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    return x.reshape(-1, d), x.shape[:-1]


def invert(model, t, x, beta=None, settings=InversionSettings()):
    """Fourier inversion at many points; returns an :class:`InversionResult`.

    Parameters
    ----------
    model : LevyModel
    t : float
    x : array_like, shape (..., d)
        Points (plain scalars allowed when ``d = 1``).
    beta : sequence of int or None
        Multi-index of a spatial derivative, ``|beta| <= 4``.
    settings : InversionSettings
    """
    if not t > 0:
        raise ValueError("t must be positive")
    d = model.dim
    beta = (0,) * d if beta is None else tuple(int(b) for b in np.atleast_1d(beta))
    if len(beta) != d or min(beta) < 0 or sum(beta) > 4:
        raise ValueError("beta must be a non-negative multi-index of length d with |beta| <= 4")
    pts, shape = _points(model, x)
    method = settings.method
    if method == "auto":
        if d == 1:
            method = "cosine"
        elif _radial_ok(model) and sum(beta) == 0:
            method = "radial-bessel"
        else:
            method = "tensor-quadrature"
    if method == "cosine":
        if d != 1:
            raise ValueError("the cosine route is one-dimensional")
        res = _invert_1d(model, t, pts[:, 0], beta[0], settings)
    elif method == "radial-bessel":
        if not _radial_ok(model) or sum(beta) > 0:
            raise ValueError("radial inversion needs an isotropic model, A = a I and beta = 0")
        res = _invert_radial(model, t, pts, settings)
    else:
        res = _invert_tensor(model, t, pts, beta, settings)
    res.values = res.values.reshape(shape)
    res.errors = res.errors.reshape(shape)
    return res


def density_at(model, t, x, settings=InversionSettings()):
    """``p(t, x)``; vectorized over points of shape ``(..., d)``.

    Raises
    ------
    NotIntegrableError
        When ``exp(-t Re Psi)`` cannot be truncated within budget.
    OscillationBudgetError
        When the panel count needed exceeds ``settings.panel_budget``.
    """
    v = invert(model, t, x, None, settings).values
    return float(v) if v.ndim == 0 else v


def density_derivative_at(model, t, x, beta, settings=InversionSettings()):
    """``d^beta p(t, x)`` for a multi-index ``beta`` with ``|beta| <= 4``."""
    v = invert(model, t, x, beta, settings).values
    return float(v) if v.ndim == 0 else v


def density_grid(model, t, points, settings=InversionSettings(), centering_mode=None):
    """Densities at ``center + points``.

    ``centering_mode`` (``h-inverse``, ``plain-drift``,
    ``drift-plus-small-jumps``) selects the drift centering added to the
    offsets; ``None`` evaluates at ``points`` as given.
    """
    from .bound import BoundFunctionContext, drift_center
    d = model.dim
    pts, _ = _points(model, points)
    center = np.zeros(d)
    if centering_mode is not None:
        center = np.asarray(drift_center(BoundFunctionContext(model, t, centering_mode)), dtype=float)
    res = invert(model, t, pts + center, None, settings)
    return DensityGrid(t, pts + center, res.values, center, res.errors)


def _scan_radius(model, t):
    if model.profile.parts:
        from .bound import BoundFunctionContext
        return BoundFunctionContext(model, t).h_inv_1t
    return float(characteristics(model).h_inv(np.array([1.0 / t]))[0])


def sup_density(model, t, settings=InversionSettings(), n_scan=81):
    """``(max_x p(t, x), argmax)`` from a scan over ``|x - c| <= 4 h0^-1(1/t)``.

    ``c`` is the default drift centering. The scan is followed by a local
    bounded search.

    Warns
    -----
    MaxOnBoundaryWarning
        If the scan maximum lies on the boundary of the window.
    """
    from .bound import BoundFunctionContext, drift_center
    d = model.dim
    R = 4.0 * _scan_radius(model, t)
    if model.profile.parts:
        c = np.asarray(drift_center(BoundFunctionContext(model, t)), dtype=float)
    else:
        c = t * model.drift
    if d == 1 or _radial_ok(model):
        if d > 1:
            # radially decreasing about t b
            c = t * model.drift
        e = np.zeros(d)
        e[0] = 1.0
        s = np.linspace(-R, R, n_scan) if d == 1 else np.linspace(0.0, R, n_scan)
        vals = density_at(model, t, c + s[:, None] * e, settings)
        i = int(np.argmax(vals))
        if i in (0, n_scan - 1) and not (d > 1 and i == 0):
            warnings.warn("density maximum on the scan boundary", MaxOnBoundaryWarning, stacklevel=2)
        step = s[1] - s[0]
        lo, hi = s[max(i - 1, 0)], s[min(i + 1, n_scan - 1)]
        res = minimize_scalar(lambda u: -float(density_at(model, t, c + u * e, settings)),
                              bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-6 * step})
        if -res.fun > vals[i]:
            return float(-res.fun), c + res.x * e
        return float(vals[i]), c + s[i] * e
    k = 9
    axes = [np.linspace(-R, R, k)] * d
    grids = np.meshgrid(*axes, indexing="ij")
    pts = c + np.stack([g.ravel() for g in grids], axis=-1)
    vals = density_at(model, t, pts, settings)
    i = int(np.argmax(vals))
    if np.any(np.isclose(np.abs(pts[i] - c), R)):
        warnings.warn("density maximum on the scan boundary", MaxOnBoundaryWarning, stacklevel=2)
    res = minimize(lambda y: -float(density_at(model, t, y, settings)), pts[i],
                   method="Nelder-Mead",
                   options={"xatol": 1e-4 * R / k, "fatol": 1e-10 * vals[i],
                            "initial_simplex": pts[i] + np.vstack([np.zeros(d), np.eye(d) * R / k])})
    if -res.fun > vals[i]:
        return float(-res.fun), np.asarray(res.x)
    return float(vals[i]), pts[i]
