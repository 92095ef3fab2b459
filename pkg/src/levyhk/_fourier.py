"""Radial oscillatory transforms of jump measures.

For a weight ``w`` on ``(0, inf)`` these routines evaluate

* ``int (1 - cos(s r)) w(r) dr``                      (kind ``"cos"``)
* ``int (1 - Lambda_d(s r)) w(r) dr``                 (kind ``"bessel"``)
* ``int (sin(s r) - s r 1{r < 1}) w(r) dr``           (kind ``"sin"``)

where ``Lambda_d(x) = Gamma(d/2) (2/x)^(d/2-1) J_{d/2-1}(x)`` is the
spherical average of ``cos<x theta, e>``. The integral is split at
``r_c = x_c / s`` (``x_c`` a kernel zero beyond ``2 pi``). Below ``r_c`` the
kernel is integrated in log radius with a cancellation-free log-magnitude
form; above it the non-oscillatory mass is integrated separately and the
oscillatory remainder is summed panel by panel between kernel zeros and
accelerated with Wynn's epsilon algorithm.

A weight is a list of signed terms ``sign * factor(r) * exp(log_w(log r))``
supported on ``[start, inf)``, each smooth on its support.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gammaln, jv

from .errors import QuadratureError
from .quadrature import integrate, panel_nodes, wynn_epsilon

_LOG2 = np.log(2.0)


@dataclass(frozen=True, eq=False)
class Term:
    """One signed smooth piece of a radial weight."""

    sign: float
    log_w: Callable          # u -> log density at r = exp(u)
    start: float = 0.0
    factor: Callable = None  # r -> bounded multiplier (may be negative)

    def value_u(self, u, extra=0.0):
        # factor(r) * exp(log_w(u) + extra), safe for extreme u
        with np.errstate(over="ignore", invalid="ignore"):
            lw = self.log_w(u) + extra
            v = np.exp(lw)
        v = np.where(np.isnan(v), 0.0, v)
        if self.factor is not None:
            v = v * self.factor(np.exp(np.clip(u, -700.0, 700.0)))
        return v


# ------------------------------------------------------------------ kernels
def bessel_lambda(d, x):
    """``Lambda_d(x)``, the characteristic function of the uniform law on the sphere."""
    x = np.asarray(x, dtype=float)
    if d == 1:
        return np.cos(x)
    if d == 3:
        return np.sinc(x / np.pi)
    nu = d / 2.0 - 1.0
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.exp(gammaln(d / 2.0) + nu * (_LOG2 - np.log(x))) * jv(nu, x)
    return np.where(x == 0, 1.0, out)


def _series_one_minus_lambda(d, x, terms=10):
    # 1 - Lambda_d(x) = sum_{k>=1} (-1)^(k+1) (x/2)^(2k) Gamma(d/2) / (k! Gamma(k+d/2))
    q = (0.5 * x) ** 2
    out = np.zeros_like(x)
    coef = np.ones_like(x)
    for k in range(1, terms + 1):
        coef = coef * q / (k * (k - 1 + d / 2.0))
        out = out + (coef if k % 2 == 1 else -coef)
    return out


def log_one_minus_kernel(kind, d, lx):
    """``log(1 - Lambda(x))`` (kinds cos/bessel) or ``log(x - sin x)`` (kind sin) from ``log x``."""
    lx = np.asarray(lx, dtype=float)
    out = np.empty_like(lx)
    tiny = lx < -25.0
    rest = ~tiny
    x = np.exp(lx[rest])
    with np.errstate(divide="ignore"):
        if kind == "sin":
            # x - sin x ~ x^3/6
            out[tiny] = 3.0 * lx[tiny] - np.log(6.0)
            small = x < 1.0
            v = np.empty_like(x)
            xs = x[small]
            x2 = xs * xs
            v[small] = xs * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0 * (1.0 - x2 / 110.0 * (1.0 - x2 / 156.0)))))
            v[~small] = x[~small] - np.sin(x[~small])
            out[rest] = np.log(v)
            return out
        dd = 1 if kind == "cos" else d
        out[tiny] = 2.0 * lx[tiny] - np.log(2.0 * dd)
        small = x < 1.0
        v = np.empty_like(x)
        v[small] = _series_one_minus_lambda(dd, x[small])
        if kind == "cos":
            v[~small] = 2.0 * np.sin(0.5 * x[~small]) ** 2
        else:
            v[~small] = 1.0 - bessel_lambda(dd, x[~small])
        out[rest] = np.log(v)
    return out


def _osc_kernel(kind, d, x):
    if kind == "cos":
        return np.cos(x)
    if kind == "sin":
        return np.sin(x)
    return bessel_lambda(d, x)


def _zero_phase(kind, d):
    # kernel zeros sit near (k + phase) * pi
    if kind == "cos":
        return 0.5
    if kind == "sin":
        return 0.0
    nu = d / 2.0 - 1.0
    return nu / 2.0 + 0.75 - 1.0  # McMahon: (k + nu/2 - 1/4) pi


def _zeros_after(kind, d, x0, n):
    ph = _zero_phase(kind, d)
    k0 = np.floor(x0 / np.pi - ph) + 1.0
    z = (k0 + np.arange(n + 1) + ph) * np.pi
    # keep a gap so the first panel is not degenerate
    if z[0] - x0 < 1e-3 * np.pi:
        return z[1:]
    return z[:-1]


def _x_cut(kind, d):
    return float(_zeros_after(kind, d, 2.0 * np.pi - 1e-9, 1)[0])


# ------------------------------------------------------------- components
def _log_integral(fun, lo, hi, rtol, breakpoints=()):
    bps = [b for b in breakpoints if lo < b < hi]
    return integrate(fun, lo, hi, breakpoints=bps, rtol=rtol, atol=0.0,
                     max_intervals=20000).value


def tail_mass(term, r0, rtol=1e-12, extra_power=0.0, breakpoints=()):
    """``int_{r0}^inf r^extra_power w(r) dr`` for a single term."""
    u0 = np.log(max(r0, term.start)) if max(r0, term.start) > 0 else -np.inf

    def f(u):
        return term.value_u(u, u * (1.0 + extra_power))
    return _log_integral(f, u0, np.inf, rtol, breakpoints)


def mass_between(term, r0, r1, power, rtol=1e-12, breakpoints=()):
    """``int_{r0}^{r1} r^power w(r) dr`` restricted to the term's support."""
    lo = max(r0, term.start)
    if r1 <= lo:
        return 0.0
    ulo = np.log(lo) if lo > 0 else -np.inf

    def f(u):
        return term.value_u(u, u * (1.0 + power))
    return _log_integral(f, ulo, np.log(r1), rtol, breakpoints)


def _near(term, s, kind, d, r_lo, r_hi, rtol, breakpoints):
    # int_{r_lo}^{r_hi} k(s r) w(r) dr with k = 1 - Lambda (>= 0) or sin x - x (<= 0)
    ls = np.log(s)
    ulo = np.log(r_lo) if r_lo > 0 else -np.inf
    uhi = np.log(r_hi)
    if uhi <= ulo:
        return 0.0

    def f(u):
        lk = log_one_minus_kernel(kind, d, ls + u)
        return term.value_u(u, lk + u)
    val = _log_integral(f, ulo, uhi, rtol, breakpoints)
    return -val if kind == "sin" else val


def _plain(term, s, kind, d, r_lo, r_hi, rtol, breakpoints):
    # int_{r_lo}^{r_hi} K(s r) w(r) dr with the oscillatory kernel, r_lo > 0
    if r_hi <= r_lo:
        return 0.0

    def f(u):
        return _osc_kernel(kind, d, s * np.exp(u)) * term.value_u(u, u)
    return _log_integral(f, np.log(r_lo), np.log(r_hi), rtol, breakpoints)


def oscillatory_tail(term, s, kind, d, x0, rtol=1e-12, order=16, max_panels=5120):
    """``int_{x0/s}^inf K(s r) w(r) dr`` by panel sums between kernel zeros."""
    n = 48
    ls = np.log(s)
    while True:
        z = _zeros_after(kind, d, x0, n)
        edges = np.concatenate([[x0], z])
        nodes, wts = panel_nodes(edges, order)
        u = np.log(nodes) - ls
        vals = _osc_kernel(kind, d, nodes) * term.value_u(u)
        panels = (vals * wts).sum(axis=1) / s
        sums = np.cumsum(panels)
        scale = np.abs(panels).max() + abs(sums[-1])
        if scale == 0.0:
            return 0.0
        if abs(panels[-1]) < 1e-17 * scale and abs(panels[-2]) < 1e-17 * scale:
            return float(sums[-1])
        tail = sums[-min(24, len(sums)):]
        lim, err = wynn_epsilon(tail)
        if err <= rtol * scale or n >= max_panels:
            if err > 1e3 * rtol * scale and n >= max_panels:
                raise QuadratureError(f"oscillatory tail did not converge (err {err:.2e})")
            return lim
        n *= 2


def transform(terms, s, kind, d=1, rtol=1e-11, breakpoints=()):
    """Evaluate a radial transform at a single frequency ``s > 0``.

    Parameters
    ----------
    terms : sequence of Term
    s : float
        Frequency.
    kind : {"cos", "bessel", "sin"}
    d : int
        Dimension for the Bessel kernel.
    breakpoints : sequence of float
        Log radii where the weight is not smooth.

    Returns
    -------
    float
    """
    s = float(s)
    if s == 0.0:
        return 0.0
    xc = _x_cut(kind, d)
    rc = xc / s
    total = 0.0
    for t in terms:
        r0 = t.start
        if kind == "sin":
            if r0 == 0.0:
                rm = min(rc, 1.0)
                v = _near(t, s, kind, d, 0.0, rm, rtol, breakpoints)
                if rc < 1.0:
                    v -= s * mass_between(t, rc, 1.0, 1.0, rtol, breakpoints)
                else:
                    v += _plain(t, s, kind, d, 1.0, rc, rtol, breakpoints)
                v += oscillatory_tail(t, s, kind, d, xc, rtol)
            else:
                if s * r0 >= xc:
                    v = oscillatory_tail(t, s, kind, d, s * r0, rtol)
                else:
                    v = _plain(t, s, kind, d, r0, rc, rtol, breakpoints)
                    v += oscillatory_tail(t, s, kind, d, xc, rtol)
                v -= s * mass_between(t, r0, max(r0, 1.0), 1.0, rtol, breakpoints)
        else:
            if s * r0 >= xc:
                v = tail_mass(t, r0, rtol, breakpoints=breakpoints) - \
                    oscillatory_tail(t, s, kind, d, s * r0, rtol)
            else:
                v = _near(t, s, kind, d, r0, rc, rtol, breakpoints)
                v += tail_mass(t, rc, rtol, breakpoints=breakpoints)
                v -= oscillatory_tail(t, s, kind, d, xc, rtol)
        total += t.sign * v
    return total
