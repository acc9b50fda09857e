"""Norming coefficients from extracted data via truncated infinite products.

The squared norm of the Cauchy solution at an eigenvalue factors as
alpha_n^2 = A_n * B_n, where A_n is the endpoint slope ratio and B_n is an
infinite product over the spectrum.  With only finitely many eigenvalues one
truncates the product at N; the schedule (epsilon, N) below guarantees a
uniform accuracy bounded by C |1 - exp(-epsilon)|.

Unmeasured eigenvalues above the data are filled with the asymptotic model
pi^2 k^2 + cbar.  Because that model tail is explicit, its log-product has a
closed form through log-gamma functions, which keeps schedules with N in the
hundreds of millions exact and cheap.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, loggamma

from .errors import (ConsistencyError, DegenerateSpectrumError, InfeasibleScheduleError,
                     InvalidInputError, SignConsistencyError)

PI2 = np.pi**2


@dataclass
class SpectralData:
    """Spectral data feeding the kernels: eigenvalues, slope ratios
    A_k = phi_k'(1)/phi_k'(0), squared norming coefficients, and the
    truncation schedule actually used."""

    lambdas: np.ndarray
    A: np.ndarray
    alpha2: np.ndarray
    N_used: int
    epsilon_used: float
    measured_count: int = 0
    cbar: float = 0.0

    def __post_init__(self):
        self.lambdas = np.asarray(self.lambdas, dtype=float)
        self.A = np.asarray(self.A, dtype=float)
        self.alpha2 = np.asarray(self.alpha2, dtype=float)
        if np.any(np.diff(self.lambdas) <= 0):
            raise InvalidInputError("eigenvalues must be strictly increasing")
        if np.any(self.alpha2 <= 0):
            raise SignConsistencyError("norming coefficients must be positive")
        if self.measured_count == 0:
            self.measured_count = len(self.lambdas)

    def __len__(self):
        return len(self.lambdas)


def trace_ratios(data):
    """Slope ratios A_k = (right product) / (left product).

    The ratios are real for a real potential; a small imaginary residue is
    discarded and a large one raises a consistency error.
    """
    left = data.left_products
    right = data.right_products
    if np.any(np.abs(left) == 0.0):
        raise InvalidInputError("left endpoint products contain zeros")
    ratios = right / left
    bad = np.abs(ratios.imag) > 1e-3 * np.abs(ratios)
    if bad.any():
        worst = np.max(np.abs(ratios.imag[bad]) / np.abs(ratios[bad]))
        raise ConsistencyError(
            f"slope ratios have relative imaginary part up to {worst:.3e}"
        )
    return ratios.real.copy()


def truncation_schedule(delta, n, eps=None):
    """Pick (epsilon, N) so that n^2 |1 - e^-eps| <= delta/2 and
    n^2 / N <= eps / (2 ln 2).

    An explicit eps overrides the delta-driven choice (still validated).
    """
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    if eps is None:
        if delta <= 0.0:
            raise InfeasibleScheduleError("delta must be positive")
        x = delta / (2.0 * n * n)
        if x >= 1.0:
            raise InfeasibleScheduleError(
                f"delta/(2 n^2) = {x:.3g} >= 1: no epsilon satisfies the bound"
            )
        eps = -np.log1p(-x)
        eps = min(eps, 1.0 - 1e-12)
    elif not 0.0 < eps < 1.0:
        raise InfeasibleScheduleError(f"epsilon = {eps} must lie in (0, 1)")
    N = int(np.ceil(2.0 * np.log(2.0) * n * n / eps))
    return float(eps), max(N, n)


def truncated_b(n, lambdas):
    """B_{n,N} = -(1/(n^2 pi^2)) prod_{k <= N, k != n} (lambda_k - lambda_n)/(k^2 pi^2).

    Direct log-domain evaluation over an explicit eigenvalue list.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    N = len(lambdas)
    if not 1 <= n <= N:
        raise InvalidInputError(f"mode index {n} outside the eigenvalue list")
    if len(np.unique(lambdas)) != N:
        raise DegenerateSpectrumError("duplicate eigenvalues in the product")
    lam_n = lambdas[n - 1]
    k = np.arange(1, N + 1, dtype=float)
    mask = k != n
    terms = (lambdas[mask] - lam_n) / (k[mask] ** 2 * PI2)
    sign = -1.0 if np.count_nonzero(terms < 0) % 2 == 0 else 1.0
    logmag = np.sum(np.log(np.abs(terms))) - np.log(n * n * PI2)
    return float(sign * np.exp(logmag))


def _tail_logprod(lam_n, a, b, cbar, model_index=None):
    """log prod_{j=a..b, j != model_index} (1 - kappa^2/j^2) for the model tail
    lambda_j = pi^2 j^2 + cbar, where kappa^2 = (lam_n - cbar)/pi^2.

    Returns (logmag, negative_factor_count).  When the mode n itself sits in
    the tail (model_index = n, so kappa = n exactly), the vanishing factor is
    excluded and the split product is evaluated with integer factorials.
    """
    if b < a:
        return 0.0, 0
    kappa2 = (lam_n - cbar) / PI2
    if model_index is not None and model_index >= a:
        k = model_index
        # left block j = a .. k-1: factors (j^2 - k^2)/j^2 < 0
        neg = k - a
        left = 0.0
        if k > a:
            left = (gammaln(k - a + 1)                        # prod (k - j)
                    + gammaln(2 * k) - gammaln(k + a)          # prod (k + j)
                    - 2.0 * (gammaln(k) - gammaln(a)))         # prod j^2
        # right block j = k+1 .. b: all positive
        right = (gammaln(b + 1 - k)
                 + gammaln(b + 1 + k) - gammaln(2 * k + 1)
                 - 2.0 * (gammaln(b + 1) - gammaln(k + 1)))
        return left + right, neg
    kappa = np.sqrt(complex(kappa2))
    if abs(kappa.imag) < 1e-12 and kappa.real >= a - 0.5:
        # too close to a pole of the gamma form: fall back to a direct sum,
        # chunked because b can be enormous
        neg = 0
        logmag = 0.0
        for lo in range(a, b + 1, 1_000_000):
            j = np.arange(lo, min(lo + 1_000_000, b + 1), dtype=float)
            terms = 1.0 - kappa2 / j**2
            neg += int(np.count_nonzero(terms < 0))
            logmag += float(np.sum(np.log(np.abs(terms))))
        return logmag, neg
    val = (loggamma(b + 1 - kappa) - loggamma(a - kappa)
           + loggamma(b + 1 + kappa) - loggamma(a + kappa)
           - 2.0 * (loggamma(b + 1) - loggamma(a)))
    return float(val.real), 0


def _filled_b(n, lams_meas, cbar, N):
    """B_{n,N} over the measured eigenvalues extended by the asymptotic model."""
    nm = len(lams_meas)
    lam_n = lams_meas[n - 1] if n <= nm else PI2 * n * n + cbar
    neg = 0
    logmag = -np.log(n * n * PI2)
    # measured block, direct
    upto = min(nm, N)
    k = np.arange(1, upto + 1, dtype=float)
    mask = k != n
    terms = (lams_meas[:upto][mask] - lam_n) / (k[mask] ** 2 * PI2)
    if np.any(terms == 0.0):
        raise DegenerateSpectrumError("duplicate eigenvalues in the product")
    neg += int(np.count_nonzero(terms < 0))
    logmag += float(np.sum(np.log(np.abs(terms))))
    # model tail, closed form
    if N > nm:
        model_index = n if n > nm else None
        tail_log, tail_neg = _tail_logprod(lam_n, nm + 1, N, cbar, model_index)
        logmag += tail_log
        neg += tail_neg
    sign = -1.0 if neg % 2 == 0 else 1.0
    return float(sign * np.exp(logmag))


def asymptotic_shift(lambdas):
    """Estimate cbar = integral of q from lambda_k - pi^2 k^2.

    Unweighted mean over measured modes excluding k = 1, whose O(1/k^2)
    correction is largest.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    ks = np.arange(1, len(lambdas) + 1, dtype=float)
    dev = lambdas - PI2 * ks**2
    return float(np.mean(dev[1:])) if len(dev) > 1 else float(dev[0])


def norming_coefficients(A, lambdas, n, N=None):
    """Squared norming coefficients alpha_k^2 = A_k * B_{k,N} for k <= n.

    lambdas are the measured eigenvalues; when N exceeds their count the tail
    is filled by the asymptotic model pi^2 k^2 + cbar.  All results must be
    positive, otherwise the extraction is inconsistent.
    """
    A = np.asarray(A, dtype=float)
    lambdas = np.asarray(lambdas, dtype=float)
    if N is None:
        N = len(lambdas)
    if n > N:
        raise InvalidInputError(f"n = {n} exceeds the product length N = {N}")
    if len(A) < n:
        raise InvalidInputError(f"need at least {n} slope ratios, got {len(A)}")
    if np.any(np.diff(lambdas) <= 0):
        raise DegenerateSpectrumError("eigenvalues must be strictly increasing")
    cbar = asymptotic_shift(lambdas)
    alpha2 = np.array([A[k - 1] * _filled_b(k, lambdas, cbar, N) for k in range(1, n + 1)])
    if np.any(alpha2 <= 0):
        bad = int(np.argmax(alpha2 <= 0)) + 1
        raise SignConsistencyError(
            f"alpha_{bad}^2 = {alpha2[bad - 1]:.3e} is not positive; extraction failed"
        )
    return alpha2


def build_spectral_data(extracted, delta=0.05, n_modes=None):
    """Assemble SpectralData from an extraction result.

    n_modes may exceed the measured count, in which case the eigenvalue list
    is padded by the asymptotic model pi^2 k^2 + cbar with slope ratios
    (-1)^k (exact for a constant potential, O(1/k^2) accurate in general).
    The schedule (epsilon, N) is chosen for the full mode count.
    """
    lams_meas = extracted.lambdas
    if np.any(np.diff(lams_meas) <= 0):
        raise InvalidInputError("extracted eigenvalues must be strictly increasing")
    A_meas = trace_ratios(extracted)
    nm = len(lams_meas)
    n = int(n_modes) if n_modes is not None else nm
    cbar = asymptotic_shift(lams_meas)
    if n <= nm:
        lams = lams_meas[:n].copy()
        A = A_meas[:n].copy()
    else:
        pad_k = np.arange(nm + 1, n + 1, dtype=float)
        lams = np.concatenate([lams_meas, PI2 * pad_k**2 + cbar])
        A = np.concatenate([A_meas, (-1.0) ** pad_k])
    eps, N = truncation_schedule(delta, n)
    # the products always use every measured eigenvalue, even when the
    # kernel keeps fewer modes
    alpha2 = norming_coefficients(A, lams_meas, n, N)
    return SpectralData(lambdas=lams, A=A, alpha2=alpha2, N_used=N,
                        epsilon_used=eps, measured_count=min(nm, n), cbar=cbar)
