"""Exception types shared across the package.

Numeric evaluation refuses to operate near poles or with divergent series
instead of returning garbage; callers (samplers, the CLI) catch the refusal
and resample or report a numeric failure.
"""


class DynrError(Exception):
    """Base class for all package errors."""


class UnsupportedType(DynrError):
    """Root system series/rank outside the supported finite types."""


class ConstructionFailure(DynrError):
    """Internal consistency check failed while building an algebra."""


class AlgebraMismatch(DynrError):
    """Tensors over different algebras were combined."""


class SpecInvalid(DynrError):
    """An r-matrix description violates its family's constraints."""


class PoleProximity(DynrError):
    """Evaluation point too close to a pole of a meromorphic coefficient."""


class ConvergenceFailure(DynrError):
    """A series cannot reach the requested accuracy within its cutoff."""


class ModeUnavailable(DynrError):
    """Requested derivative mode is not implemented for this spec."""


class RootSumNonzero(DynrError):
    """Triangle identity requested for roots that do not sum to zero."""


class TooLarge(DynrError):
    """Exhaustive enumeration refused for oversized input."""


class PropertyViolated(DynrError):
    """A root subset fails a stated precondition (closure / no opposite pairs)."""


class SearchExhausted(DynrError):
    """A feasibility search ran out of budget (indicates a bug, not math)."""


class SubalgebraInvalid(DynrError):
    """Root subset does not define a reductive subalgebra containing h."""


class SamplingExhausted(DynrError):
    """Could not find pole-free sample points within the resample budget."""
