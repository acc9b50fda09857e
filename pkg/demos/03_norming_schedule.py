"""Norming coefficients from truncated infinite products.

The slope ratios A_k and the eigenvalues determine the squared norms
alpha_k^2 = A_k B_k through a product over the whole spectrum.  With N
eigenvalues the truncated product is accurate only when N >> n^2, which the
schedule (epsilon, N) quantifies: n^2/N <= eps/(2 ln 2) keeps every alpha_k
within about |1 - e^-eps| of the truth.
"""

import numpy as np

import qrecon as qr

print("== schedule table: delta -> (epsilon, N) ==")
print("delta   n    epsilon      N")
for delta in (0.2, 0.05, 0.01):
    for n in (3, 8, 20):
        eps, N = qr.truncation_schedule(delta, n)
        print(f"{delta:5.2f}  {n:3d}  {eps:.3e}  {N:>10d}")
print("(N grows like n^4/delta: accuracy for many modes is expensive)")

print("\n== free-case accuracy against alpha_k^2 = 1/(2 pi^2 k^2) ==")
n = 5
ks = np.arange(1, n + 1, dtype=float)
lams = np.pi**2 * ks**2
exact = 1.0 / (2.0 * np.pi**2 * ks**2)
print("N          max relative error")
for N in (50, 500, 5000, 50_000):
    alpha2 = qr.norming_coefficients((-1.0) ** ks, lams, n, N)
    print(f"{N:<9d}  {np.max(np.abs(alpha2 / exact - 1.0)):.3e}")

print("\n== truncation bound |alpha - alpha~| <= 4 |1 - e^-eps| ==")
for nn in (1, 3, 5):
    eps, N = qr.truncation_schedule(0.05, nn)
    kk = np.arange(1, nn + 1, dtype=float)
    alpha2 = qr.norming_coefficients((-1.0) ** kk, np.pi**2 * kk**2, nn, N)
    gap = np.max(np.abs(np.sqrt(alpha2) - 1.0 / (np.sqrt(2) * np.pi * kk)))
    print(f"n = {nn}: gap {gap:.2e} vs bound {4 * abs(1 - np.exp(-eps)):.2e}")
