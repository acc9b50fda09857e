"""Sturm-Liouville machinery on [0, 1] with Dirichlet boundary conditions.

Provides the Cauchy initial-value solves y'' = (q - lambda) y with y(0) = 0,
y'(0) = 1, a shooting eigensolver (eigenvalues are the zeros of y(1, .)),
and the two classical identities tying eigenfunction norms to boundary data:
the norm identity ||y||^2 = y'(1) * dy(1)/dlambda and the representation of
y(1, .) as an infinite product over the spectrum.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InvalidInputError, UnsupportedSpectrumError
from .grids import GridFunction

BISECT_REL_TOL = 1e-12
BRACKET_HALF_WIDTH = 4.0


@dataclass
class CauchyTrace:
    """Solution of the Cauchy problem at one spectral parameter, on the q grid."""

    y: np.ndarray
    yprime: np.ndarray
    lam: float


@dataclass
class EigenSystem:
    """Dirichlet eigendata: lambdas, endpoint slopes of the normalized
    eigenfunctions, L2 norms of the Cauchy solutions, and the grid
    eigenfunctions themselves."""

    lambdas: np.ndarray
    slope0: np.ndarray
    slope1: np.ndarray
    norms: np.ndarray
    eigenfunctions: list

    def __len__(self):
        return len(self.lambdas)


def _rk4_final(qvals, lams, h):
    """Vectorized classical RK4 sweep; returns y(1, .), y'(1, .) per lambda.

    q between nodes is the linear interpolant, so the midpoint samples are
    nodal averages.
    """
    lams = np.asarray(lams, dtype=float)
    y = np.zeros_like(lams)
    p = np.ones_like(lams)
    for i in range(len(qvals) - 1):
        q0 = qvals[i]
        q1 = qvals[i + 1]
        qm = 0.5 * (q0 + q1)
        k1y = p
        k1p = (q0 - lams) * y
        y2 = y + 0.5 * h * k1y
        p2 = p + 0.5 * h * k1p
        k2y = p2
        k2p = (qm - lams) * y2
        y3 = y + 0.5 * h * k2y
        p3 = p + 0.5 * h * k2p
        k3y = p3
        k3p = (qm - lams) * y3
        y4 = y + h * k3y
        p4 = p + h * k3p
        k4y = p4
        k4p = (q1 - lams) * y4
        y = y + (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        p = p + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
    return y, p


def _rk4_path(qvals, lams, h):
    """Same sweep as _rk4_final but storing the whole trajectory.

    Returns arrays of shape (m + 1, nlam).
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    m = len(qvals) - 1
    ys = np.zeros((m + 1, len(lams)))
    ps = np.zeros((m + 1, len(lams)))
    y = np.zeros_like(lams)
    p = np.ones_like(lams)
    ys[0] = y
    ps[0] = p
    for i in range(m):
        q0 = qvals[i]
        q1 = qvals[i + 1]
        qm = 0.5 * (q0 + q1)
        k1y = p
        k1p = (q0 - lams) * y
        y2 = y + 0.5 * h * k1y
        p2 = p + 0.5 * h * k1p
        k2y = p2
        k2p = (qm - lams) * y2
        y3 = y + 0.5 * h * k2y
        p3 = p + 0.5 * h * k2p
        k3y = p3
        k3p = (qm - lams) * y3
        y4 = y + h * k3y
        p4 = p + h * k3p
        k4y = p4
        k4p = (q1 - lams) * y4
        y = y + (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        p = p + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        ys[i + 1] = y
        ps[i + 1] = p
    return ys, ps


def cauchy_solve(q, lam):
    """Solve y'' = (q - lam) y, y(0) = 0, y'(0) = 1 on the grid of q."""
    if not np.all(np.isfinite(q.values)):
        raise InvalidInputError("potential contains non-finite samples")
    if not np.isfinite(lam):
        raise InvalidInputError("spectral parameter must be finite")
    ys, ps = _rk4_path(q.values, [float(lam)], q.h)
    return CauchyTrace(y=ys[:, 0], yprime=ps[:, 0], lam=float(lam))


def terminal_values(q, lams):
    """y(1, lam) and y'(1, lam) for an array of spectral parameters."""
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    return _rk4_final(q.values, lams, q.h)


def dirichlet_eigens(q, count):
    """First `count` Dirichlet eigenvalues and normalized eigenfunctions of
    -phi'' + q phi.

    Roots of lam -> y(1, lam) are bracketed inside the asymptotic windows
    pi^2 k^2 + mean(q) +- Delta (Delta doubling on failure) and refined by
    bisection to relative tolerance well below 1e-10.
    """
    if count < 1:
        raise InvalidInputError("count must be >= 1")
    qvals = q.values
    if not np.all(np.isfinite(qvals)):
        raise InvalidInputError("potential contains non-finite samples")
    cbar = q.mean()
    ks = np.arange(1, count + 1)
    centers = np.pi**2 * ks.astype(float) ** 2 + cbar
    # neighbor gap is ~ pi^2 (2k - 1); never widen past half of it
    gap_cap = 0.5 * np.pi**2 * (2.0 * ks - 1.0)
    delta = np.full(count, BRACKET_HALF_WIDTH)

    lo = centers - delta
    hi = centers + delta
    flo, _ = _rk4_final(qvals, lo, q.h)
    fhi, _ = _rk4_final(qvals, hi, q.h)
    while True:
        bad = np.sign(flo) == np.sign(fhi)
        if not bad.any():
            break
        if np.any(delta[bad] >= gap_cap[bad]):
            k_fail = int(ks[bad][np.argmax(delta[bad] >= gap_cap[bad])])
            raise ConvergenceError(
                f"could not bracket eigenvalue {k_fail}: no sign change of y(1, .) "
                f"within the widened asymptotic window"
            )
        delta[bad] = np.minimum(delta[bad] * 2.0, gap_cap[bad])
        lo = centers - delta
        hi = centers + delta
        flo, _ = _rk4_final(qvals, lo, q.h)
        fhi, _ = _rk4_final(qvals, hi, q.h)

    for _ in range(64):
        mid = 0.5 * (lo + hi)
        fmid, _ = _rk4_final(qvals, mid, q.h)
        go_left = np.sign(fmid) == np.sign(flo)
        lo = np.where(go_left, mid, lo)
        flo = np.where(go_left, fmid, flo)
        hi = np.where(go_left, hi, mid)
        if np.all(hi - lo <= BISECT_REL_TOL * np.maximum(1.0, np.abs(mid))):
            break
    lams = 0.5 * (lo + hi)

    if np.any(np.abs(lams) < 1e-9):
        raise UnsupportedSpectrumError(
            "an eigenvalue is numerically zero; shift the potential by a constant"
        )
    if np.any(np.diff(lams) <= 0):
        raise ConvergenceError("computed eigenvalues are not strictly increasing")

    ys, ps = _rk4_path(qvals, lams, q.h)
    norms = np.sqrt(np.trapezoid(ys * ys, dx=q.h, axis=0))
    # zero counting guards against a bracket landing on the wrong root
    interior = ys[1:-1, :]
    crossings = np.sum(np.signbit(interior[1:] * interior[:-1]), axis=0)
    for j, k in enumerate(ks):
        if crossings[j] != k - 1:
            raise ConvergenceError(
                f"eigenfunction {k} has {crossings[j]} interior zeros, expected {k - 1}"
            )
    slope0 = 1.0 / norms
    slope1 = ps[-1, :] / norms
    funcs = [GridFunction(ys[:, j] / norms[j]) for j in range(count)]
    return EigenSystem(lambdas=lams, slope0=slope0, slope1=slope1, norms=norms,
                       eigenfunctions=funcs)


def norm_identity_residual(q, sys, k):
    """Relative defect of ||y||^2 = y'(1, lam_k) * dy(1, lam_k)/dlambda.

    The lambda derivative is a centered difference with relative step 1e-5,
    Richardson-extrapolated once.  Index k is 1-based.
    """
    if not 1 <= k <= len(sys):
        raise InvalidInputError(f"mode index {k} outside computed system")
    lam = sys.lambdas[k - 1]
    nrm2 = sys.norms[k - 1] ** 2
    step = 1e-5 * max(1.0, abs(lam))
    y1, p1 = _rk4_final(q.values, np.array([lam - step, lam + step,
                                            lam - 0.5 * step, lam + 0.5 * step]), q.h)
    d_full = (y1[1] - y1[0]) / (2.0 * step)
    d_half = (y1[3] - y1[2]) / step
    ydot = (4.0 * d_half - d_full) / 3.0
    _, pend = _rk4_final(q.values, np.array([lam]), q.h)
    return float(abs(nrm2 - pend[0] * ydot) / nrm2)


def y1_product(lam, lambdas):
    """Evaluate prod_k (lambda_k - lam) / (k^2 pi^2) in the log domain.

    This is the infinite-product representation of y(1, lam) truncated to the
    provided eigenvalues; an exact hit on some lambda_k returns 0.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    if np.any(np.diff(lambdas) <= 0):
        raise InvalidInputError("eigenvalue list must be strictly increasing")
    diffs = lambdas - lam
    if np.any(diffs == 0.0):
        return 0.0
    k = np.arange(1, len(lambdas) + 1, dtype=float)
    sign = 1.0 if np.count_nonzero(diffs < 0) % 2 == 0 else -1.0
    logmag = np.sum(np.log(np.abs(diffs)) - np.log(k * k * np.pi**2))
    return float(sign * np.exp(logmag))
