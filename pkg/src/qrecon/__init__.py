"""Recover the potential of a 1D Schrodinger operator on [0, 1] from
boundary derivative traces.

The toolkit covers the whole chain: a modal forward simulator, frequency
extraction from the trace convolution operator, norming coefficients via
truncated infinite products, the connecting kernel, potential recovery by
the Gelfand-Levitan equation or the boundary control method, and recovery
of the initial data.
"""

from .errors import ReconError
from .grids import GridFunction
from .sturm import CauchyTrace, EigenSystem, cauchy_solve, dirichlet_eigens, \
    norm_identity_residual, y1_product
from .simulate import ComplexTrace, SourceSpec, project_source, synthesize_traces
from .extract import (DiscreteOperator, ExtractOptions, ExtractedData, ModeEstimate,
                      biorthonormalize, convolution_operator, endpoint_products,
                      extract_spectrum, generalized_modes, numeric_time_derivative)
from .norming import (SpectralData, build_spectral_data, norming_coefficients,
                      trace_ratios, truncated_b, truncation_schedule)
from .kernel import (KernelGrid, diagonal_residual, kernel_via_p, restricted_kernel,
                     restricted_response, response_primitive, s_lambda)
from .reconstruct import (GLSolution, ReconstructionResult, bcm_mu, bcm_potential,
                          gl_potential, gl_solve, reconstruct_potential)
from .source import SourceEstimate, recover_coeffs, reconstruct_source
from .pipeline import convergence_experiment, load_config, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "CauchyTrace", "ComplexTrace", "DiscreteOperator", "EigenSystem",
    "ExtractOptions", "ExtractedData", "GLSolution", "GridFunction", "KernelGrid",
    "ModeEstimate", "ReconError", "ReconstructionResult", "SourceEstimate",
    "SourceSpec", "SpectralData", "bcm_mu", "bcm_potential", "biorthonormalize",
    "build_spectral_data", "cauchy_solve", "convergence_experiment",
    "convolution_operator", "diagonal_residual", "dirichlet_eigens",
    "endpoint_products", "extract_spectrum", "generalized_modes", "gl_potential",
    "gl_solve", "kernel_via_p", "load_config", "norm_identity_residual",
    "norming_coefficients", "numeric_time_derivative", "project_source",
    "reconstruct_potential", "reconstruct_source", "recover_coeffs",
    "response_primitive", "restricted_kernel", "restricted_response",
    "run_pipeline", "s_lambda", "synthesize_traces", "trace_ratios",
    "truncated_b", "truncation_schedule", "y1_product",
]
