"""Forward simulator: modal expansion of the evolution and boundary traces.

The evolution of the initial state a(x) under the 1D Schrodinger flow is
exactly sum_k a_k exp(i lambda_k t) phi_k(x) for this problem class, so the
boundary derivative traces are synthesized directly from the eigendata; no
time stepping is involved.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateSourceError, InvalidInputError
from .grids import GridFunction

MIN_TIME_SAMPLES = 64
GENERIC_REL_THRESHOLD = 1e-12


@dataclass
class SourceSpec:
    """Initial state, given either as grid samples or as modal coefficients."""

    grid: Optional[GridFunction] = None
    coeffs: Optional[np.ndarray] = None

    def __post_init__(self):
        if (self.grid is None) == (self.coeffs is None):
            raise InvalidInputError("provide exactly one of grid samples or coefficients")
        if self.coeffs is not None:
            self.coeffs = np.asarray(self.coeffs, dtype=complex)
            if self.coeffs.ndim != 1 or len(self.coeffs) < 1:
                raise InvalidInputError("coefficient form needs a 1-D array of length >= 1")
            if not np.all(np.isfinite(self.coeffs)):
                raise InvalidInputError("source coefficients contain non-finite values")
        else:
            v = self.grid.values
            scale = max(np.max(np.abs(v)), 1.0)
            if abs(v[0]) > 1e-9 * scale or abs(v[-1]) > 1e-9 * scale:
                raise InvalidInputError("grid source must vanish at both endpoints")

    @property
    def mode_count(self):
        return None if self.coeffs is None else len(self.coeffs)


@dataclass
class ComplexTrace:
    """Complex boundary observation on the uniform time grid of [0, T_obs]."""

    T_obs: float
    samples: np.ndarray = field()

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.T_obs <= 0:
            raise InvalidInputError("observation length must be positive")
        if len(self.samples) < MIN_TIME_SAMPLES + 1:
            raise InvalidInputError(f"trace needs at least {MIN_TIME_SAMPLES + 1} samples")
        if not np.all(np.isfinite(self.samples)):
            raise InvalidInputError("trace contains non-finite samples")

    @property
    def M(self):
        return len(self.samples) - 1

    @property
    def dt(self):
        return self.T_obs / self.M

    @property
    def t(self):
        return np.linspace(0.0, self.T_obs, self.M + 1)


def project_source(a, sys):
    """Modal coefficients of the source and a per-mode genericity flag.

    Grid sources are projected onto the eigenfunctions by trapezoid
    quadrature; coefficient sources pass through.  A mode is flagged
    non-generic when its coefficient is below 1e-12 of the largest one.
    """
    if a.coeffs is not None:
        if len(a.coeffs) > len(sys):
            raise InvalidInputError("more coefficients than computed modes")
        coeffs = a.coeffs.copy()
    else:
        vals = a.grid.values
        h = a.grid.h
        coeffs = np.array([
            np.trapezoid(vals * phi.values, dx=h) for phi in sys.eigenfunctions
        ], dtype=complex)
    top = np.max(np.abs(coeffs))
    if top == 0.0:
        raise DegenerateSourceError("every modal coefficient is zero")
    generic = np.abs(coeffs) >= GENERIC_REL_THRESHOLD * top
    if not generic.any():
        raise DegenerateSourceError("every modal coefficient is below threshold")
    return coeffs, generic


def synthesize_traces(sys, coeffs, T_obs=1.0, M=2048, noise_rel=0.0, rng=None):
    """Boundary derivative traces r0, r1 and their analytic time derivatives.

    r_j(t_i) = sum_k a_k exp(i lambda_k t_i) slopej_k on t_i = i T_obs / M.
    Optional additive complex Gaussian noise of relative amplitude noise_rel
    is applied to r0 and r1 only; the derivative traces stay exact and are
    meant for simulation-mode studies that isolate differentiation error.

    Returns (r0, r1, r0dot, r1dot) as ComplexTrace objects.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if len(coeffs) > len(sys):
        raise InvalidInputError("more coefficients than computed modes")
    if T_obs <= 0:
        raise InvalidInputError("T_obs must be positive")
    lams = sys.lambdas[: len(coeffs)]
    t = np.linspace(0.0, T_obs, M + 1)
    phases = np.exp(1j * np.outer(t, lams))
    w0 = coeffs * sys.slope0[: len(coeffs)]
    w1 = coeffs * sys.slope1[: len(coeffs)]
    r0 = phases @ w0
    r1 = phases @ w1
    d0 = phases @ (1j * lams * w0)
    d1 = phases @ (1j * lams * w1)
    if noise_rel > 0.0:
        rng = np.random.default_rng(0) if rng is None else rng
        for arr in (r0, r1):
            scale = noise_rel * np.max(np.abs(arr))
            arr += scale * (rng.standard_normal(len(arr)) + 1j * rng.standard_normal(len(arr))) / np.sqrt(2.0)
    return (ComplexTrace(T_obs, r0), ComplexTrace(T_obs, r1),
            ComplexTrace(T_obs, d0), ComplexTrace(T_obs, d1))
