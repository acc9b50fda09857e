"""Smoothed numerical differentiation for reconstructed diagonals.

Truncating a spectral sum at n modes leaves an oscillatory residue at the
known angular frequency 2*sqrt(lambda_max).  A moving average whose width is
exactly one period of that oscillation annihilates it while leaving smooth
components essentially untouched, so the differentiation entry points here
accept an optional matched pre-filter width.
"""

import math

import numpy as np


def sliding_fit_derivative(values, h, window=9, degree=2, order=1):
    """Differentiate samples by a sliding local least-squares polynomial fit.

    Parameters
    ----------
    values : array of samples on a uniform grid of spacing h
    window : odd node count of the fit window (shrunk one-sided at the ends)
    degree : polynomial degree of the local fit
    order  : derivative order to return (order <= degree)
    """
    values = np.asarray(values, dtype=float)
    n = len(values)
    half = window // 2
    fact = float(math.factorial(order))
    out = np.empty(n)
    # one shared stencil covers every centered interior window; correlate
    # applies the weights without flipping them
    if n >= window:
        offs = np.arange(-half, half + 1) * h
        coef = np.linalg.pinv(np.vander(offs, degree + 1, increasing=True))[order] * fact
        out[half:n - half] = np.correlate(values, coef, mode="valid")
    for idx in list(range(min(half, n))) + list(range(max(n - half, 0), n)):
        lo = max(0, idx - half)
        hi = min(n, idx + half + 1)
        offs = (np.arange(lo, hi) - idx) * h
        deg = min(degree, len(offs) - 1)
        if deg < order:
            out[idx] = 0.0
            continue
        coef = np.linalg.pinv(np.vander(offs, deg + 1, increasing=True))
        out[idx] = coef[order] @ values[lo:hi] * fact
    return out


def matched_boxcar(values, h, width):
    """Moving average of continuous width `width` via the trapezoid primitive.

    The window shrinks symmetrically near the ends, so the filter is exact on
    affine data everywhere.  width <= h returns the samples unchanged.
    """
    values = np.asarray(values, dtype=float)
    if width <= h:
        return values.copy()
    n = len(values)
    x = np.arange(n) * h
    cum = np.empty(n)
    cum[0] = 0.0
    np.cumsum(0.5 * (values[1:] + values[:-1]) * h, out=cum[1:])
    total = x[-1]
    halfw = np.minimum(width / 2.0, np.minimum(x, total - x))
    out = values.copy()
    active = halfw > h / 2.0
    a = x[active] - halfw[active]
    b = x[active] + halfw[active]
    out[active] = (np.interp(b, x, cum) - np.interp(a, x, cum)) / (2.0 * halfw[active])
    return out
