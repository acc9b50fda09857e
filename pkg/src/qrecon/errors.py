"""Exception hierarchy for the reconstruction toolkit.

Every failure mode raised by the library derives from ReconError so callers
(and the command line driver) can map errors to pipeline stages.
"""


class ReconError(Exception):
    """Base class for all toolkit errors."""


class InvalidInputError(ReconError):
    """Non-finite or structurally invalid input data."""


class ConvergenceError(ReconError):
    """An iterative search (root bracketing, refinement) failed."""


class DomainError(ReconError):
    """A requested evaluation lies outside the sampled domain."""


class DegenerateSourceError(ReconError):
    """Every modal coefficient of the source is numerically zero."""


class EmptyDataError(ReconError):
    """The discretized operator carries no numerical signal."""


class PairingError(ReconError):
    """Mode families could not be matched one-to-one by frequency."""


class ConsistencyError(ReconError):
    """A quantity that must be real/consistent came out otherwise."""


class InfeasibleScheduleError(ReconError):
    """No (epsilon, N) truncation schedule exists for the request."""


class DegenerateSpectrumError(ReconError):
    """Duplicate eigenvalues make the infinite products meaningless."""


class SignConsistencyError(ReconError):
    """A norming coefficient came out non-positive."""


class UnsupportedSpectrumError(ReconError):
    """An eigenvalue of exactly zero is not supported by the kernels."""


class IllConditionedError(ReconError):
    """A dense Fredholm system exceeded the condition-number budget."""


class SingularDivisionError(ReconError):
    """The boundary-control trace mu vanishes on an interior window."""


class DegenerateSlopeError(ReconError):
    """An eigenfunction endpoint slope is numerically zero."""


class TraceFormatError(ReconError):
    """A trace/artifact file violates its schema."""
