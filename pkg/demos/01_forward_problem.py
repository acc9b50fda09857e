"""Forward side: Dirichlet eigendata of -y'' + q y and the two identities
that make the inverse machinery work.

The eigenvalues are the zeros of lambda -> y(1, lambda) for the Cauchy
solution with y(0) = 0, y'(0) = 1.  Two classical facts get checked
numerically: the squared norm of y equals y'(1) times the lambda-derivative
of y(1, .), and y(1, .) is recovered from its zeros by an infinite product.
"""

import numpy as np

import qrecon as qr

ks = np.arange(1, 9)

print("== free operator (q = 0) ==")
q0 = qr.GridFunction.zero(2048)
sys0 = qr.dirichlet_eigens(q0, 8)
print("k   lambda_k        pi^2 k^2        slope0        slope1")
for k, lam, s0, s1 in zip(ks, sys0.lambdas, sys0.slope0, sys0.slope1):
    print(f"{k}  {lam:13.6f}  {np.pi**2 * k**2:13.6f}  {s0:11.6f}  {s1:11.6f}")
print("(slopes should be sqrt(2) k pi with alternating sign at x = 1)")

print("\n== oscillating potential q = 10 sin(pi x) ==")
q = qr.GridFunction.from_callable(lambda x: 10 * np.sin(np.pi * x), 2048)
sys = qr.dirichlet_eigens(q, 8)
print("k   lambda_k - pi^2 k^2   (tends to mean(q) = {:.6f})".format(q.mean()))
for k, lam in zip(ks, sys.lambdas):
    print(f"{k}  {lam - np.pi**2 * k**2:14.6f}")

print("\n== norm identity ||y||^2 = y'(1) dy(1)/dlambda ==")
for k in (1, 4, 8):
    res = qr.norm_identity_residual(q, sys, k)
    print(f"k = {k}: relative residual {res:.2e}")

print("\n== eigenvalue product for y(1, lambda) ==")
lams_free = np.pi**2 * np.arange(1, 10_001, dtype=float) ** 2
for lam, label, ref in ((0.0, "lambda = 0", 1.0),
                        (np.pi**2 / 4, "lambda = pi^2/4", 2 / np.pi)):
    val = qr.y1_product(lam, lams_free)
    print(f"{label}: product = {val:.6f}, closed form = {ref:.6f}")
