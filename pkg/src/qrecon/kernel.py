"""Restricted response function and connecting kernel from spectral data.

All spectral measures here are atomic (finitely many modes), so every
integral against the regularized spectral measure is a finite sum.  Each mode
contributes a perturbed term weighted by sign(lambda_k)/alpha_k^2 minus the
matching free term weighted by 2 pi^2 k^2; negative eigenvalues enter through
the analytic extension of sin(sqrt(lambda) t)/sqrt(lambda).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidInputError, UnsupportedSpectrumError

PI2 = np.pi**2
MIN_KERNEL_INTERVALS = 32
_TAYLOR_CUT = 1e-8


@dataclass
class KernelGrid:
    """Symmetric samples of the connecting kernel c(t, s) on [0, tau]^2.

    lam_max records the largest retained eigenvalue so downstream smoothing
    can match the truncation-ringing period.
    """

    tau: float
    m: int
    values: np.ndarray
    lam_max: Optional[float] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.m + 1, self.m + 1):
            raise InvalidInputError("kernel grid shape does not match m")
        if not np.all(np.isfinite(self.values)):
            raise InvalidInputError("kernel grid contains non-finite values")

    @property
    def h(self):
        return self.tau / self.m

    @property
    def t(self):
        return np.linspace(0.0, self.tau, self.m + 1)


def s_lambda(lam, t):
    """sin(sqrt(lam) t)/sqrt(lam) extended analytically across lam <= 0.

    Equals t at lam = 0 and sinh(sqrt(-lam) t)/sqrt(-lam) for lam < 0; small
    |lam| t^2 is served by a three-term Taylor series.
    """
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.empty_like(t)
    small = np.abs(lam) * t * t < _TAYLOR_CUT
    ts = t[small]
    out[small] = ts * (1.0 - lam * ts * ts / 6.0 + lam * lam * ts**4 / 120.0)
    big = ~small
    if big.any():
        if lam > 0:
            rt = np.sqrt(lam)
            out[big] = np.sin(rt * t[big]) / rt
        else:
            rt = np.sqrt(-lam)
            out[big] = np.sinh(rt * t[big]) / rt
    return float(out[0]) if scalar else out


def cos_deficit(lam, t):
    """(1 - cos(sqrt(lam) t)) / lam with the same analytic extension.

    This is the closed-form primitive of s_lambda: integral_0^t s_lambda."""
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.empty_like(t)
    small = np.abs(lam) * t * t < _TAYLOR_CUT
    ts = t[small]
    out[small] = 0.5 * ts * ts * (1.0 - lam * ts * ts / 12.0 + lam * lam * ts**4 / 360.0)
    big = ~small
    if big.any():
        if lam > 0:
            out[big] = (1.0 - np.cos(np.sqrt(lam) * t[big])) / lam
        else:
            out[big] = (np.cosh(np.sqrt(-lam) * t[big]) - 1.0) / (-lam)
    return float(out[0]) if scalar else out


def _check_spectrum(sd):
    if len(sd) == 0:
        raise InvalidInputError("spectral data is empty")
    if np.any(np.abs(sd.lambdas) < 1e-12):
        raise UnsupportedSpectrumError("a zero eigenvalue has no sign factor")


def restricted_response(sd, t):
    """Restricted response r_n(t): perturbed minus free modal sums."""
    _check_spectrum(sd)
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.zeros_like(t)
    for k, (lam, a2) in enumerate(zip(sd.lambdas, sd.alpha2), start=1):
        out += s_lambda(lam, t) * (np.sign(lam) / a2)
        out -= s_lambda(PI2 * k * k, t) * (2.0 * PI2 * k * k)
    return float(out[0]) if scalar else out


def response_primitive(sd, t):
    """p(t) = (1/2) integral_0^|t| r_n, evaluated termwise in closed form."""
    _check_spectrum(sd)
    t = np.abs(np.asarray(t, dtype=float))
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.zeros_like(t)
    for k, (lam, a2) in enumerate(zip(sd.lambdas, sd.alpha2), start=1):
        out += cos_deficit(lam, t) * (np.sign(lam) / a2)
        out -= cos_deficit(PI2 * k * k, t) * (2.0 * PI2 * k * k)
    out *= 0.5
    return float(out[0]) if scalar else out


def restricted_kernel(sd, tau=1.0, m=256):
    """Connecting kernel c(t, s) on [0, tau]^2 as a sum of separable terms.

    Each mode adds an outer product, so the grid is exactly symmetric.
    """
    if not 0.0 < tau <= 1.0:
        raise InvalidInputError("tau must lie in (0, 1]")
    if m < MIN_KERNEL_INTERVALS:
        raise InvalidInputError(f"kernel grid needs m >= {MIN_KERNEL_INTERVALS}")
    _check_spectrum(sd)
    tg = tau - np.linspace(0.0, tau, m + 1)
    values = np.zeros((m + 1, m + 1))
    for k, (lam, a2) in enumerate(zip(sd.lambdas, sd.alpha2), start=1):
        v = s_lambda(lam, tg)
        values += (np.sign(lam) / a2) * np.outer(v, v)
        v0 = s_lambda(PI2 * k * k, tg)
        values -= (2.0 * PI2 * k * k) * np.outer(v0, v0)
    return KernelGrid(tau=tau, m=m, values=values, lam_max=float(np.max(sd.lambdas)))


def kernel_via_p(sd, tau=1.0, m=256):
    """Same kernel assembled through c(t, s) = p(2 tau - t - s) - p(t - s)."""
    if not 0.0 < tau <= 1.0:
        raise InvalidInputError("tau must lie in (0, 1]")
    if m < MIN_KERNEL_INTERVALS:
        raise InvalidInputError(f"kernel grid needs m >= {MIN_KERNEL_INTERVALS}")
    _check_spectrum(sd)
    tg = np.linspace(0.0, tau, m + 1)
    sum_arg = 2.0 * tau - (tg[:, None] + tg[None, :])
    diff_arg = np.abs(tg[:, None] - tg[None, :])
    values = response_primitive(sd, sum_arg.ravel()).reshape(sum_arg.shape)
    values -= response_primitive(sd, diff_arg.ravel()).reshape(diff_arg.shape)
    return KernelGrid(tau=tau, m=m, values=values, lam_max=float(np.max(sd.lambdas)))


def diagonal_residual(kg, sd):
    """Worst defect of the diagonal identity c(t, t) = p(2 (tau - t))."""
    diag = np.diagonal(kg.values)
    target = response_primitive(sd, 2.0 * (kg.tau - kg.t))
    return float(np.max(np.abs(diag - target)))
