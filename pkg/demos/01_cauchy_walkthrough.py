"""Characteristics, bound function and density of the one-dimensional Cauchy-type model.

For nu0(r) = r^-2 everything has a closed form, which makes it a good first tour:
h(r) = 4/r, K(r) = 2/r, Psi(z) = pi |z| and p(t, x) is the Cauchy law of scale pi t.
"""
import numpy as np

from levyhk.bound import BoundFunctionContext, eval_rho, integrate_rho, solve_r0
from levyhk.characteristics import characteristics
from levyhk.density import density_at
from levyhk.model import builtin_model

m = builtin_model("cauchy")
ch = characteristics(m)

r = np.array([0.1, 1.0, 10.0])
print("r      h(r)      K(r)      Psi*(r)")
for ri, hi, ki, pi in zip(r, ch.h(r), ch.K(r), ch.psi_star(r)):
    print(f"{ri:<6g} {hi:<9.6g} {ki:<9.6g} {pi:.6g}")

t = 0.25
ctx = BoundFunctionContext(m, t)
print(f"\nt = {t}: h^-1(1/t) = {ctx.h_inv_1t:.6g}, r0 = {solve_r0(ctx):.10f} (sqrt(1/2) = {np.sqrt(0.5):.10f})")
print(f"integral of rho_t = {integrate_rho(ctx):.12f} (2 sqrt 2 = {2 * np.sqrt(2):.12f})")

x = np.array([0.0, 0.5, 2.0, 8.0])
p = density_at(m, t, x)
s = np.pi * t
exact = s / np.pi / (s ** 2 + x ** 2)
rho = eval_rho(ctx, x)
print("\nx     p(t,x)        closed form   p / rho_t")
for xi, pi, ei, qi in zip(x, p, exact, p / rho):
    print(f"{xi:<5g} {pi:<13.10g} {ei:<13.10g} {qi:.4f}")
