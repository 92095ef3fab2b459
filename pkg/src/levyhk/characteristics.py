"""Characteristic functions of a Lévy triplet.

For a model with Gaussian matrix ``A`` and jump density ``n`` this module
computes

* ``h(r) = |A| r^-2 + int (1 ∧ |x|^2 / r^2) n(x) dx``,
* ``K(r) = |A| r^-2 + r^-2 int_{|x|<r} |x|^2 n(x) dx``,
* the characteristic exponent ``Psi``, its radial majorant
  ``Psi*(r) = sup_{|z|<=r} Re Psi(z)`` and the generalized inverse
  ``sup{r : Psi*(r) <= s}``,
* the truncated drift ``b_r`` and the directional quadratic form
  ``<x,Ax> + int_{|<x,z>|<1} <x,z>^2 n(z) dz``.

Radial integrals are accumulated once on a log-radius grid (32 points per
decade, every profile breakpoint is a node) and evaluated exactly at any
radius by adding one Kronrod panel from the nearest node. Grids extend
lazily when a query falls outside. ``Re Psi`` and ``Im Psi`` are tabulated
on a log-frequency grid by the transforms of :mod:`levyhk._fourier` and
interpolated with cubic splines in log-log coordinates.
"""

from __future__ import annotations

import threading
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from . import _fourier as fr
from .errors import FlatRegionWarning, NotInvertibleError
from .model import LevyModel, sphere_area
from .quadrature import NODES15, WK15, integrate

LOG10 = np.log(10.0)
AUTO_FLOOR = 1e-8  # lowest frequency reached by automatic table extension
U_LIMIT = 345.0  # |log r| cap, r in [1e-150, 1e150]


# ------------------------------------------------------- cumulative tables
def _relative_rule(d, n=None, power=4):
    """Angular rule on the half sphere ``<theta, e> > 0`` in a frame with pole ``e``.

    Returns the pole cosines ``c`` (shape ``(nc,)``), local directions
    ``(nc, nb, d)`` whose first coordinate is ``c`` and weights ``(nc, nb)``.
    The polar variable is graded as ``(1 - u)^power`` towards the equator
    where kernels behave like ``c^alpha``.
    """
    n = (24 if d == 2 else 16) if n is None else n
    key = (d, n, power)
    if key in _RULES:
        return _RULES[key]
    g, wg = np.polynomial.legendre.leggauss(n)
    u = 0.5 * (g + 1.0)
    wu = 0.5 * wg
    if d == 2:
        # polar angle psi in (0, pi/2), both signs of the transverse part
        psi = 0.5 * np.pi * (1.0 - (1.0 - u) ** power)
        wpsi = 0.5 * np.pi * power * (1.0 - u) ** (power - 1) * wu
        c = np.cos(psi)
        sn = np.sin(psi)
        local = np.stack([np.stack([c, sn], -1), np.stack([c, -sn], -1)], axis=1)
        w = np.stack([wpsi, wpsi], axis=1)
    elif d == 3:
        # cosine c = u^power in (0, 1) and a uniform azimuth
        c = u ** power
        wcos = power * u ** (power - 1) * wu
        nb = 32
        beta = 2.0 * np.pi * np.arange(nb) / nb
        sn = np.sqrt(1.0 - c * c)
        local = np.stack([np.broadcast_to(c[:, None], (n, nb)),
                          sn[:, None] * np.cos(beta)[None, :],
                          sn[:, None] * np.sin(beta)[None, :]], axis=-1)
        w = np.broadcast_to(wcos[:, None] * (2.0 * np.pi / nb), (n, nb)).copy()
    else:
        raise ValueError("relative angular rules exist for d = 2, 3")
    _RULES[key] = (c, local, w)
    return _RULES[key]


_RULES = {}


def _frame(e):
    """Orthonormal frames ``(n, d, d)`` with first row ``e``."""
    n, d = e.shape
    if d == 2:
        return np.stack([e, np.stack([-e[:, 1], e[:, 0]], -1)], axis=1)
    k = np.argmin(np.abs(e), axis=-1)
    ref = np.eye(3)[k]
    f1 = np.cross(e, ref)
    f1 /= np.linalg.norm(f1, axis=-1, keepdims=True)
    f2 = np.cross(e, f1)
    return np.stack([e, f1, f2], axis=1)


class _CumTable:
    """Cumulative integrals of ``f(u)`` over a log-radius grid.

    ``f`` maps an array of log radii to an ``(n, k)`` array. Each column is
    anchored at ``-inf`` (``"left"``), ``+inf`` (``"right"``) or ``u = 0``
    (``"zero"``).
    """

    def __init__(self, f, anchors, breakpoints_u=(), per_decade=32,
                 u_lo=np.log(1e-6), u_hi=np.log(1e6), rtol=1e-13):
        self.f = f
        self.anchors = tuple(anchors)
        self.bps = np.array(sorted(b for b in breakpoints_u if np.isfinite(b)), dtype=float)
        self.step = LOG10 / per_decade
        self.rtol = rtol
        self._lock = threading.RLock()
        self._build(u_lo, u_hi)

    def _grid(self, u_lo, u_hi):
        k0 = int(np.floor(u_lo / self.step))
        k1 = int(np.ceil(u_hi / self.step))
        g = np.arange(k0, k1 + 1) * self.step
        inside = self.bps[(self.bps > g[0]) & (self.bps < g[-1])]
        g = np.union1d(g, inside)
        g = np.union1d(g, [0.0]) if g[0] < 0 < g[-1] else g
        # drop nodes that nearly coincide with breakpoints
        keep = np.ones(len(g), bool)
        for b in inside:
            close = (np.abs(g - b) < 1e-9 * self.step) & (g != b)
            keep &= ~close
        return g[keep]

    def _column(self, k):
        return lambda u: self.f(u)[:, k]

    def _build(self, u_lo, u_hi):
        u = self._grid(u_lo, u_hi)
        a, b = u[:-1], u[1:]
        half = 0.5 * (b - a)
        x = (0.5 * (a + b))[:, None] + half[:, None] * NODES15[None, :]
        fx = self.f(x.ravel())
        ncol = fx.shape[1]
        fx = fx.reshape(x.shape + (ncol,))
        incr = np.einsum("ijk,j->ik", fx, WK15) * half[:, None]
        cum = np.zeros((len(u), ncol))
        for k, anchor in enumerate(self.anchors):
            if anchor == "left":
                base = integrate(self._column(k), -np.inf, u[0], rtol=self.rtol,
                                 breakpoints=self.bps, max_intervals=20000).value
                cum[:, k] = base + np.concatenate([[0.0], np.cumsum(incr[:, k])])
            elif anchor == "right":
                base = integrate(self._column(k), u[-1], np.inf, rtol=self.rtol,
                                 breakpoints=self.bps, max_intervals=20000).value
                rc = np.concatenate([np.cumsum(incr[::-1, k])[::-1], [0.0]])
                cum[:, k] = base + rc
            else:
                c = np.concatenate([[0.0], np.cumsum(incr[:, k])])
                i0 = int(np.argmin(np.abs(u)))
                if abs(u[i0]) > 1e-12:
                    c0 = integrate(self._column(k), u[i0], 0.0, rtol=self.rtol).value
                else:
                    c0 = 0.0
                cum[:, k] = c - c[i0] - c0
        self.u = u
        self.cum = cum

    def ensure(self, u_min, u_max):
        """Extend the grid so that ``[u_min, u_max]`` is covered."""
        lo = max(min(u_min, self.u[0]), -U_LIMIT)
        hi = min(max(u_max, self.u[-1]), U_LIMIT)
        if lo < self.u[0] or hi > self.u[-1]:
            with self._lock:
                if lo < self.u[0] or hi > self.u[-1]:
                    self._build(max(min(lo, self.u[0]) - 2 * LOG10, -U_LIMIT),
                                min(max(hi, self.u[-1]) + 2 * LOG10, U_LIMIT))

    def __call__(self, u):
        """Cumulative values at log radii ``u`` (1-D), shape ``(n, k)``."""
        u = np.asarray(u, dtype=float)
        if u.size == 0:
            return np.zeros((0, self.cum.shape[1]))
        self.ensure(float(u.min()), float(u.max()))
        uc = np.clip(u, self.u[0], self.u[-1])
        idx = np.clip(np.searchsorted(self.u, uc, side="right") - 1, 0, len(self.u) - 2)
        a = self.u[idx]
        half = 0.5 * (uc - a)
        x = (0.5 * (uc + a))[:, None] + half[:, None] * NODES15[None, :]
        fx = self.f(x.ravel()).reshape(x.shape + (-1,))
        local = np.einsum("ijk,j->ik", fx, WK15) * half[:, None]
        out = self.cum[idx].copy()
        for k, anchor in enumerate(self.anchors):
            out[:, k] += -local[:, k] if anchor == "right" else local[:, k]
        return out


# ---------------------------------------------------------- Psi tables
class _SplineTable:
    """Values of a transform on a log-frequency grid with lazy extension.

    ``mode="log"`` interpolates ``log v`` (positive functions), ``"ratio"``
    interpolates ``v / ref(s)`` for a positive reference table. ``func=None``
    is the identically zero transform of a model without jumps.
    """

    def __init__(self, func, per_decade=32, s_lo=1e-6, s_hi=1e6, mode="log", ref=None):
        self.func = func
        self.step = LOG10 / per_decade
        self.mode = mode
        self.ref = ref
        self._lock = threading.RLock()
        self.u = np.zeros(0)
        self.v = np.zeros(0)
        self._extend(np.log(s_lo), np.log(s_hi))

    def _extend(self, u_lo, u_hi):
        k0 = int(np.floor(u_lo / self.step))
        k1 = int(np.ceil(u_hi / self.step))
        grid = np.arange(k0, k1 + 1) * self.step
        have = set(np.round(self.u / self.step).astype(int).tolist())
        new = [g for g in grid if int(round(g / self.step)) not in have]
        if self.func is None:
            vals = np.zeros(len(new))
        else:
            vals = np.array([self.func(np.exp(g)) for g in new])
        u = np.concatenate([self.u, new])
        v = np.concatenate([self.v, vals])
        o = np.argsort(u)
        self.u, self.v = u[o], v[o]
        if self.func is None:
            self._spl = lambda x: np.zeros(np.shape(x))
        elif self.mode == "log":
            self._spl = CubicSpline(self.u, np.log(self.v))
        else:
            self._spl = CubicSpline(self.u, self.v / self.ref.values_at(self.u))

    def ensure(self, s_min, s_max):
        u_lo, u_hi = np.log(s_min), np.log(s_max)
        if u_lo < self.u[0] or u_hi > self.u[-1]:
            with self._lock:
                lo = max(min(u_lo - LOG10, self.u[0]), -U_LIMIT)
                hi = min(max(u_hi + LOG10, self.u[-1]), U_LIMIT)
                if self.ref is not None:
                    self.ref.ensure(np.exp(lo), np.exp(hi))
                self._extend(lo, hi)

    def values_at(self, u):
        """Interpolated values; below the grid a bottom-decade power law is used."""
        u = np.asarray(u, dtype=float)
        if self.func is None:
            return np.zeros(u.shape)
        u0 = self.u[0]
        low = u < u0
        uc = np.maximum(u, u0)
        if self.mode == "log":
            lv = self._spl(uc)
            if low.any():
                k = min(len(self.u) - 1, int(round(LOG10 / self.step)))
                slope = (np.log(self.v[k]) - np.log(self.v[0])) / (self.u[k] - u0)
                lv = np.where(low, np.log(self.v[0]) + slope * (u - u0), lv)
            return np.exp(lv)
        return self._spl(uc) * self.ref.values_at(u)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        out = np.zeros(s.shape)
        pos = s > 0
        if not pos.any():
            return out
        sp = s[pos]
        # automatic extension stops at AUTO_FLOOR; ensure() can go further
        lo = max(sp.min(), min(AUTO_FLOOR, np.exp(self.u[0])))
        self.ensure(lo, max(sp.max(), lo))
        out[pos] = self.values_at(np.log(sp))
        return out


# ------------------------------------------------------------ radial table
@dataclass
class RadialTable:
    """Monotone tabulation of a radial function on a log-radius grid.

    Attributes
    ----------
    log_r : ndarray
        Strictly increasing log radii.
    values : ndarray
        Function values at the nodes.
    monotone_direction : {"increasing", "decreasing"}
    exact_tails : tuple of float
        Power-law exponents fitted on the first and last decade.
    name : str
    """

    log_r: np.ndarray
    values: np.ndarray
    monotone_direction: str
    exact_tails: tuple = field(default=(np.nan, np.nan))
    name: str = ""

    def __post_init__(self):
        self.log_r = np.asarray(self.log_r, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if np.any(np.diff(self.log_r) <= 0):
            raise ValueError("log_r must be strictly increasing")
        if np.all(np.isnan(self.exact_tails)):
            self.exact_tails = (self._edge_exponent(True), self._edge_exponent(False))

    def _edge_exponent(self, low):
        lv = np.log(np.abs(self.values) + 1e-300)
        sel = (self.log_r <= self.log_r[0] + LOG10) if low else (self.log_r >= self.log_r[-1] - LOG10)
        if sel.sum() < 2:
            return np.nan
        return float(np.polyfit(self.log_r[sel], lv[sel], 1)[0])

    @property
    def r(self):
        return np.exp(self.log_r)

    def is_monotone(self, strict=False):
        dv = np.diff(self.values)
        if self.monotone_direction == "increasing":
            return bool(np.all(dv > 0) if strict else np.all(dv >= 0))
        return bool(np.all(dv < 0) if strict else np.all(dv <= 0))

    def __call__(self, r):
        """Log-log linear interpolation with power-law extrapolation; exact at nodes."""
        lr = np.log(np.asarray(r, dtype=float))
        lv = np.log(self.values)
        out = np.interp(lr, self.log_r, lv)
        lo = lr < self.log_r[0]
        hi = lr > self.log_r[-1]
        out = np.where(lo, lv[0] + self.exact_tails[0] * (lr - self.log_r[0]), out)
        out = np.where(hi, lv[-1] + self.exact_tails[1] * (lr - self.log_r[-1]), out)
        return np.exp(out)

    def invert(self, v):
        """Radius at which the interpolant takes the value ``v``."""
        lv = np.log(self.values)
        x, y = (lv, self.log_r) if self.monotone_direction == "increasing" else (lv[::-1], self.log_r[::-1])
        return np.exp(np.interp(np.log(np.asarray(v, dtype=float)), x, y))


def write_radial_csv(path_or_file, tables):
    """Write tables sharing one grid as CSV with columns ``r`` and one per table.

    Values are printed with 17 significant digits.
    """
    names = list(tables)
    first = tables[names[0]]
    rows = [first.r] + [tables[n].values for n in names]
    lines = ["r," + ",".join(names)]
    for i in range(len(first.log_r)):
        lines.append(",".join(f"{col[i]:.17g}" for col in rows))
    text = "\n".join(lines) + "\n"
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
    else:
        with open(path_or_file, "w") as fh:
            fh.write(text)
    return text


# --------------------------------------------------------- main interface
@dataclass(frozen=True)
class ComplexExponent:
    """Value of the characteristic exponent ``Psi(z) = re + i im``."""

    re: float
    im: float

    def __complex__(self):
        return complex(self.re, self.im)


class Characteristics:
    """Cached characteristic functions of one model.

    Use :func:`characteristics` to obtain the shared instance of a model.
    """

    def __init__(self, model: LevyModel, per_decade=32, psi_per_decade=32, rtol=1e-12):
        self.model = model
        self.per_decade = per_decade
        self.psi_per_decade = psi_per_decade
        self.rtol = rtol
        self.d = model.dim
        self.A_norm = model.A_norm
        prof = model.profile
        self._bps_u = tuple(np.log(b) for b in prof.breakpoints)
        self._moments = None
        self._first = None
        self._re = None
        self._im = None
        self._lock = threading.RLock()

    # -------------------------------------------------------- radial moments
    def _radial_integrand(self, u):
        m = self.model
        lw = m.radial_log_weight(u)
        with np.errstate(over="ignore", invalid="ignore"):
            e1 = np.exp(lw + u)
            e3 = np.exp(lw + 3.0 * u)
        e1 = np.where(np.isnan(e1), 0.0, e1)
        e3 = np.where(np.isnan(e3), 0.0, e3)
        mass = m.angular_mass(np.exp(np.clip(u, -700, 700)))
        with np.errstate(over="ignore", invalid="ignore"):
            return np.stack([mass * e3, mass * e1], axis=1)

    @property
    def moments(self):
        if self._moments is None:
            with self._lock:
                if self._moments is None:
                    self._moments = _CumTable(self._radial_integrand, ("left", "right"),
                                              self._bps_u, self.per_decade)
        return self._moments

    def _kt(self, r):
        """Jump parts ``(r^-2 int_{|x|<r} |x|^2 n, int_{|x|>=r} n)`` for 1-D ``r``."""
        u = np.log(np.asarray(r, dtype=float))
        kj = np.empty(u.shape)
        tm = np.empty(u.shape)
        inside = np.abs(u) <= U_LIMIT
        if inside.any():
            mt = self.moments(u[inside])
            kj[inside] = mt[:, 0] / np.exp(2.0 * u[inside])
            tm[inside] = mt[:, 1]
        for i in np.flatnonzero(~inside):
            kj[i], tm[i] = self._kt_direct(u[i])
        return kj, tm

    def _kt_direct(self, u0):
        # scaled integrals for radii beyond the table (|log r| > U_LIMIT)
        m = self.model

        def g(v, shift):
            lw = m.radial_log_weight(v) + shift
            with np.errstate(over="ignore", invalid="ignore"):
                e = np.exp(lw)
            e = np.where(np.isnan(e), 0.0, e)
            return m.angular_mass(np.exp(np.clip(v, -700, 700))) * e

        if u0 > 0:
            mt = self.moments
            ub = mt.u[-1]
            base = mt.cum[-1, 0] * np.exp(-2.0 * u0)
            kj = base + integrate(lambda v: g(v, 3.0 * v - 2.0 * u0), ub, u0,
                                  rtol=1e-12, max_intervals=20000).value
        else:
            kj = integrate(lambda v: g(v, 3.0 * v - 2.0 * u0), -np.inf, u0,
                           rtol=1e-12, max_intervals=20000).value
        tm = integrate(lambda v: g(v, v), u0, np.inf, rtol=1e-12, max_intervals=20000).value
        return kj, tm

    def second_moment(self, r):
        """``int_{|x|<r} |x|^2 n(x) dx``."""
        r = np.asarray(r, dtype=float)
        kj, _ = self._kt(r.ravel())
        with np.errstate(over="ignore", invalid="ignore"):
            return (kj * r.ravel() ** 2).reshape(r.shape)

    def tail_mass(self, r):
        """``int_{|x|>=r} n(x) dx``."""
        r = np.asarray(r, dtype=float)
        return self._kt(r.ravel())[1].reshape(r.shape)

    def h(self, r):
        """``h(r)``, vectorized over ``r > 0``."""
        r = np.asarray(r, dtype=float)
        rr = r.ravel()
        kj, tm = self._kt(rr)
        return (self._gauss_term(rr) + kj + tm).reshape(r.shape)

    def K(self, r):
        """``K(r)``, vectorized over ``r > 0``."""
        r = np.asarray(r, dtype=float)
        rr = r.ravel()
        kj, _ = self._kt(rr)
        return (self._gauss_term(rr) + kj).reshape(r.shape)

    def _gauss_term(self, rr):
        if self.A_norm == 0.0:
            return np.zeros_like(rr)
        with np.errstate(over="ignore"):
            return self.A_norm / rr ** 2

    def h_inv(self, v, steps=80):
        """Inverse of the strictly decreasing ``h``.

        Brackets each level between two table nodes (extending the table if
        needed) and bisects ``steps`` times in log radius.
        """
        v = np.asarray(v, dtype=float)
        flat = v.ravel()
        if np.any(flat <= 0) or not np.all(np.isfinite(flat)):
            raise NotInvertibleError("h^-1 needs finite positive levels")
        mt = self.moments
        for _ in range(40):
            hu = self._h_nodes()
            if flat.max() <= hu[0] and flat.min() >= hu[-1]:
                break
            lo, hi = mt.u[0], mt.u[-1]
            if flat.max() > hu[0]:
                lo -= 4 * LOG10
            if flat.min() < hu[-1]:
                hi += 4 * LOG10
            lo, hi = max(lo, -U_LIMIT), min(hi, U_LIMIT)
            if lo == mt.u[0] and hi == mt.u[-1]:
                break
            mt.ensure(lo, hi)
        hu = self._h_nodes()
        out = np.empty(flat.shape)
        inside = (flat <= hu[0]) & (flat >= hu[-1])
        for i in np.flatnonzero(~inside):
            out[i] = self._h_inv_direct(flat[i], above=flat[i] > hu[0], steps=steps)
        fi = flat[inside]
        # h decreasing: index of last node with h >= v
        idx = np.searchsorted(-hu, -fi, side="right") - 1
        idx = np.clip(idx, 0, len(hu) - 2)
        a = mt.u[idx].copy()
        b = mt.u[idx + 1].copy()
        lt = np.log(fi)
        for _ in range(steps):
            mid = 0.5 * (a + b)
            hm = np.log(self.h(np.exp(mid)))
            above = hm >= lt
            a = np.where(above, mid, a)
            b = np.where(above, b, mid)
            if np.all(b - a <= 1e-15 * np.maximum(1.0, np.abs(a))):
                break
        out[inside] = np.exp(0.5 * (a + b))
        return out.reshape(v.shape)

    def _h_inv_direct(self, level, above, steps):
        # levels beyond the table: bisect on directly integrated h over [U_LIMIT, 700]
        a, b = (-700.0, -U_LIMIT) if above else (U_LIMIT, 700.0)
        lt = np.log(level)

        def lh(u):
            return float(np.log(self.h(np.array([np.exp(u)]))[0]))
        if lh(a) < lt:
            raise NotInvertibleError(f"level {level:.3e} above h at r=exp(-700)")
        if lh(b) > lt:
            raise NotInvertibleError(f"level {level:.3e} below h at r=exp(700)")
        for _ in range(steps):
            mid = 0.5 * (a + b)
            if lh(mid) >= lt:
                a = mid
            else:
                b = mid
            if b - a <= 1e-15 * max(1.0, abs(a)):
                break
        return float(np.exp(0.5 * (a + b)))

    def _h_nodes(self):
        mt = self.moments
        r = np.exp(mt.u)
        return (self.A_norm + mt.cum[:, 0]) / r ** 2 + mt.cum[:, 1]

    # ------------------------------------------------------------ drift b_r
    def _first_integrand(self, u):
        m = self.model
        lw = m.radial_log_weight(u)
        with np.errstate(over="ignore", invalid="ignore"):
            e2 = np.exp(lw + 2.0 * u)
        e2 = np.where(np.isnan(e2), 0.0, e2)
        q = m.angular_first(np.exp(np.clip(u, -700, 700)))
        return e2[:, None] * q

    def drift_br(self, r):
        """``b_r = b + int z (1{|z|<r} - 1{|z|<1}) n(z) dz``, shape ``r.shape + (d,)``."""
        r = np.asarray(r, dtype=float)
        b = self.model.drift
        if self.model.symmetric:
            return np.broadcast_to(b, r.shape + (self.d,)).copy()
        if self._first is None:
            with self._lock:
                if self._first is None:
                    self._first = _CumTable(self._first_integrand, ("zero",) * self.d,
                                            self._bps_u, self.per_decade)
        vals = self._first(np.log(r.ravel()))
        return (b[None, :] + vals).reshape(r.shape + (self.d,))

    # ----------------------------------------------------------------- Psi
    def _terms(self, factor, with_omega):
        m = self.model
        d = self.d
        out = []
        for part in m.profile.parts:
            lw_part = part.log_nu
            if with_omega:
                c = np.log(with_omega)

                def lw(u, f=lw_part, c=c):
                    return f(u) + (d - 1) * u + c
            else:
                def lw(u, f=lw_part):
                    return f(u) + (d - 1) * u
            out.append(fr.Term(part.sign, lw, part.start, factor))
        return out

    def _re_func(self):
        m = self.model
        d = self.d
        if not m.profile.parts:
            return None
        if d == 1:
            if m.anisotropy is None:
                terms = self._terms(None, 2.0)
            else:
                terms = self._terms(lambda r: m.angular_mass(r), None)
            return lambda s: fr.transform(terms, s, "cos", 1, self.rtol * 10, self._bps_u)
        if m.isotropic:
            mass = float(m.angular_mass(np.array(1.0)))
            terms = self._terms(None, mass)
            return lambda s: fr.transform(terms, s, "bessel", d, self.rtol * 10, self._bps_u)
        terms = self._terms(None, None)
        return lambda s: fr.transform(terms, s, "cos", 1, self.rtol * 10, self._bps_u)

    def _im_func(self):
        m = self.model
        if not m.profile.parts:
            return None
        if self.d == 1:
            terms = self._terms(lambda r: m.angular_first(r)[..., 0], None)
        else:
            terms = self._terms(None, None)
        return lambda s: fr.transform(terms, s, "sin", 1, self.rtol * 10, self._bps_u)

    @property
    def re_table(self):
        """Radial transform table: ``psi_m`` (d=1), ``Psi_0`` (isotropic) or the 1-D projection kernel."""
        if self._re is None:
            with self._lock:
                if self._re is None:
                    self._re = _SplineTable(self._re_func(), self.psi_per_decade)
        return self._re

    @property
    def im_table(self):
        if self._im is None:
            with self._lock:
                if self._im is None:
                    self._im = _SplineTable(self._im_func(), self.psi_per_decade,
                                            mode="ratio", ref=self.re_table)
        return self._im

    def _as_points(self, z):
        z = np.asarray(z, dtype=float)
        if self.d == 1 and (z.ndim == 0 or z.shape[-1] != 1):
            z = z[..., None]
        return z

    def re_psi(self, z, exact=False):
        """``Re Psi(z)`` for points of shape ``(..., d)`` (or scalars when ``d = 1``)."""
        z = self._as_points(z)
        m = self.model
        gauss = np.einsum("...i,ij,...j->...", z, m.A, z)
        if self.d == 1:
            s = np.abs(z[..., 0])
            return gauss + self._re_eval(s, exact)
        if m.isotropic:
            return gauss + self._re_eval(np.linalg.norm(z, axis=-1), exact)
        if not m.profile.parts:
            return gauss
        return gauss + self._angular(z, lambda s: self._re_eval(s, exact), odd=False)

    def im_psi(self, z, exact=False):
        """``Im Psi(z)``."""
        z = self._as_points(z)
        m = self.model
        out = -(z @ m.drift)
        if m.symmetric or not m.profile.parts:
            return out
        if self.d == 1:
            s = z[..., 0]
            return out - np.sign(s) * self._im_eval(np.abs(s), exact)
        return out - self._angular(z, lambda s: self._im_eval(s, exact), odd=True)

    def _angular(self, z, kernel, odd, chunk=2048):
        # int_S a(theta) sgn(<z,theta>)^odd kernel(|<z,theta>|) dtheta with the
        # rule attached to z, so the result has no kinks away from z = 0
        shape = z.shape[:-1]
        z = z.reshape(-1, self.d)
        out = np.zeros(len(z))
        a = self.model.anisotropy
        c, local, w = _relative_rule(self.d)
        for i0 in range(0, len(z), chunk):
            zz = z[i0:i0 + chunk]
            rho = np.linalg.norm(zz, axis=-1)
            nz = rho > 0
            if not nz.any():
                continue
            frame = _frame(zz[nz] / rho[nz, None])
            plus = np.einsum("cbk,nkj->ncbj", local, frame)
            minus = plus - 2.0 * local[None, :, :, :1] * frame[:, None, None, 0, :]
            ap, am = a(plus), a(minus)
            ang = (((ap - am) if odd else (ap + am)) * w).sum(axis=-1)
            res = np.zeros(len(zz))
            res[nz] = (kernel(rho[nz, None] * c[None, :]) * ang).sum(axis=-1)
            out[i0:i0 + chunk] = res
        return out.reshape(shape)

    def _re_eval(self, s, exact):
        if not exact:
            return self.re_table(s)
        f = self._re_func()
        if f is None:
            return np.zeros(np.shape(s))
        return np.vectorize(lambda x: f(x) if x > 0 else 0.0)(s)

    def _im_eval(self, s, exact):
        if not exact:
            return self.im_table(s)
        f = self._im_func()
        if f is None:
            return np.zeros(np.shape(s))
        return np.vectorize(lambda x: f(x) if x > 0 else 0.0)(s)

    def psi(self, z, exact=False):
        """Complex ``Psi(z)``."""
        return self.re_psi(z, exact) + 1j * self.im_psi(z, exact)

    # ------------------------------------------------------------ Psi star
    def _ray_max(self, rho):
        # max over sampled directions of Re Psi(rho theta), for radii rho
        m = self.model
        rho = np.asarray(rho, dtype=float)
        if self.d == 1 or m.isotropic:
            lam = float(np.linalg.eigvalsh(m.A).max())
            return lam * rho ** 2 + self.re_table(rho)
        th, _ = m.directions
        pts = rho[..., None, None] * th
        return self.re_psi(pts).max(axis=-1)

    def _star_nodes(self):
        tab = self.re_table
        key = (len(tab.u), tab.u[0], tab.u[-1])
        cache = getattr(self, "_star_cache", None)
        if cache is None or cache[0] != key:
            u = tab.u.copy()
            vals = self._ray_max(np.exp(u))
            self._star_cache = (key, u, np.maximum.accumulate(vals))
        return self._star_cache[1], self._star_cache[2]

    def psi_star(self, r):
        """``Psi*(r) = sup_{|z|<=r} Re Psi(z)`` (running radial max over sampled directions)."""
        r = np.asarray(r, dtype=float)
        flat = r.ravel()
        pos = flat > 0
        out = np.zeros(flat.shape)
        if pos.any():
            self.re_table.ensure(flat[pos].min(), flat[pos].max())
            u, run = self._star_nodes()
            lr = np.log(flat[pos])
            idx = np.searchsorted(u, lr, side="right") - 1
            direct = self._ray_max(flat[pos])
            prev = np.where(idx >= 0, run[np.clip(idx, 0, None)], 0.0)
            out[pos] = np.maximum(prev, direct)
        return out.reshape(r.shape)

    def psi_star_inv(self, s, steps=80):
        """``sup{r : Psi*(r) <= s}``; warns on plateaus and returns their right end."""
        s = np.asarray(s, dtype=float)
        flat = s.ravel()
        tab = self.re_table
        for _ in range(60):
            u, run = self._star_nodes()
            if run[0] <= flat.min() and run[-1] > flat.max():
                break
            lo = np.exp(u[0]) / (1e4 if run[0] > flat.min() else 1.0)
            hi = np.exp(u[-1]) * (1e4 if run[-1] <= flat.max() else 1.0)
            if lo < np.exp(-U_LIMIT + 10) or hi > np.exp(U_LIMIT - 10):
                raise NotInvertibleError("Psi* does not reach the requested level in range")
            tab.ensure(lo, hi)
        u, run = self._star_nodes()
        idx = np.searchsorted(run, flat, side="right") - 1
        idx = np.clip(idx, 0, len(u) - 2)
        plateau = False
        for i, lvl in zip(idx, flat):
            j = i
            while j > 0 and abs(run[j - 1] - lvl) <= 1e-12 * lvl and abs(run[j] - lvl) <= 1e-12 * lvl:
                plateau = True
                j -= 1
        if plateau:
            warnings.warn("Psi* is constant near the requested level; returning the right end",
                          FlatRegionWarning, stacklevel=2)
        a = u[idx].copy()
        b = u[idx + 1].copy()
        for _ in range(steps):
            mid = 0.5 * (a + b)
            ok = self._ray_max(np.exp(mid)) <= flat
            a = np.where(ok, mid, a)
            b = np.where(ok, b, mid)
            if np.all(b - a <= 1e-15 * np.maximum(1.0, np.abs(a))):
                break
        return np.exp(0.5 * (a + b)).reshape(s.shape)

    # ---------------------------------------------------- directional form
    def directional_K(self, x, n_angles=64):
        """``<x,Ax> + int_{|<x,z>|<1} <x,z>^2 n(z) dz`` for points ``(..., d)``."""
        x = self._as_points(x)
        m = self.model
        gauss = np.einsum("...i,ij,...j->...", x, m.A, x)
        nx = np.linalg.norm(x, axis=-1)
        if self.d == 1:
            return gauss + nx ** 2 * self.second_moment(1.0 / nx)
        if m.isotropic:
            # average over the angle phi between z and x
            from .quadrature import gauss_legendre
            g, w = gauss_legendre(n_angles)
            phi = 0.25 * np.pi * (g + 1.0)
            wphi = 0.25 * np.pi * w
            c = np.cos(phi)
            dens = np.sin(phi) ** (self.d - 2)
            ratio = sphere_area(self.d - 1) / sphere_area(self.d)
            rad = 1.0 / (nx[..., None] * c)
            m2 = self.second_moment(rad)
            return gauss + nx ** 2 * 2.0 * ratio * (m2 * (c ** 2 * dens * wphi)).sum(axis=-1)
        th, w = m.directions
        a = m.anisotropy(th)
        proj = np.abs(x @ th.T)
        mass0 = float(m.angular_mass(np.array(1.0)))
        with np.errstate(divide="ignore"):
            rad = np.where(proj > 0, 1.0 / proj, np.inf)
        m2 = np.where(np.isfinite(rad), self._m2_unit(np.where(np.isfinite(rad), rad, 1.0)), 0.0)
        # the second moment table carries the total angular mass; divide it out
        return gauss + (proj ** 2 * m2 / mass0) @ (w * a)

    def _m2_unit(self, r):
        return self.second_moment(r)

    # ------------------------------------------------------------- tables
    def radial_tables(self, r=None):
        """Tables of ``h``, ``K`` and ``Psi*`` on ``r`` (default ``[1e-6, 1e6]``, 32/decade)."""
        if r is None:
            r = np.logspace(-6, 6, 12 * self.per_decade + 1)
        r = np.asarray(r, dtype=float)
        lr = np.log(r)
        return {
            "h": RadialTable(lr, self.h(r), "decreasing", name="h"),
            "K": RadialTable(lr, self.K(r), "decreasing", name="K"),
            "psi_star": RadialTable(lr, self.psi_star(r), "increasing", name="psi_star"),
        }


_CACHE_ATTR = "_characteristics"


def characteristics(model: LevyModel) -> Characteristics:
    """Shared :class:`Characteristics` instance attached to ``model``."""
    ch = model.__dict__.get(_CACHE_ATTR)
    if ch is None:
        ch = Characteristics(model)
        object.__setattr__(model, _CACHE_ATTR, ch)
    return ch


# ------------------------------------------------------ functional API
def compute_h(model, r):
    """``h(r)``; see :class:`Characteristics`."""
    return characteristics(model).h(r)


def compute_K(model, r):
    """``K(r)``."""
    return characteristics(model).K(r)


def invert_h(model, u):
    """``h^-1(u)``."""
    return characteristics(model).h_inv(u)


def compute_psi(model, z, exact=False):
    """``Psi(z)`` as a :class:`ComplexExponent` for a single point, or complex array."""
    ch = characteristics(model)
    val = ch.psi(z, exact)
    if np.ndim(val) == 0:
        return ComplexExponent(float(np.real(val)), float(np.imag(val)))
    return val


def compute_psi_star(model, r):
    """``Psi*(r)``."""
    return characteristics(model).psi_star(r)


def invert_psi_star(model, s):
    """``sup{r : Psi*(r) <= s}``."""
    return characteristics(model).psi_star_inv(s)


def compute_drift_br(model, r):
    """Truncated drift ``b_r``."""
    return characteristics(model).drift_br(r)


def directional_K(model, x):
    """Directional quadratic form of the (C4)-type conditions."""
    return characteristics(model).directional_K(x)
