"""Initial-data recovery from the reconstructed potential.

With the potential known, the eigenfunction slopes phi_k'(0) follow from a
forward eigensolve, the stored endpoint products divide out to the Fourier
coefficients, and the initial state is its truncated eigenfunction series.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSlopeError, InvalidInputError
from .grids import GridFunction
from .sturm import dirichlet_eigens

SLOPE_FLOOR = 1e-8


@dataclass
class SourceEstimate:
    grid: GridFunction          # real part of the series
    series: np.ndarray          # full complex series on the grid
    coeffs: np.ndarray
    imag_residue: float
    warnings: list = field(default_factory=list)


def recover_coeffs(qhat, p0, sys=None):
    """Fourier coefficients a_k = (a_k phi_k'(0)) / phi_k'(0).

    Runs the Dirichlet eigensolver on the reconstructed potential unless a
    precomputed system is supplied.  Returns (coeffs, eigensystem).
    """
    p0 = np.asarray(p0, dtype=complex)
    if len(p0) == 0:
        raise InvalidInputError("no endpoint products to invert")
    if sys is None:
        sys = dirichlet_eigens(qhat, len(p0))
    slopes = sys.slope0[: len(p0)]
    if np.any(np.abs(slopes) < SLOPE_FLOOR):
        k = int(np.argmax(np.abs(slopes) < SLOPE_FLOOR)) + 1
        raise DegenerateSlopeError(
            f"slope phi_{k}'(0) is numerically zero; reconstruction failed"
        )
    return p0 / slopes, sys


def reconstruct_source(coeffs, sys):
    """Initial state from its eigenfunction series, a(x) = sum a_k phi_k(x).

    The real part is returned; the relative imaginary residue is reported and
    flagged above 1e-3.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if len(coeffs) > len(sys):
        raise InvalidInputError("more coefficients than eigenfunctions")
    basis = np.column_stack([phi.values for phi in sys.eigenfunctions[: len(coeffs)]])
    series = basis @ coeffs
    scale = np.max(np.abs(series))
    residue = float(np.max(np.abs(series.imag)) / scale) if scale > 0 else 0.0
    warnings = []
    if residue > 1e-3:
        warnings.append(f"recovered source has relative imaginary residue {residue:.3e}")
    return SourceEstimate(grid=GridFunction(series.real.copy()), series=series,
                          coeffs=coeffs, imag_residue=residue, warnings=warnings)
