"""Exception types shared across the library.

The CLI maps these onto exit codes: invalid input -> 2, non-convergence and
conditioning failures -> 3, missing lattice -> 4.
"""


class EigenforgeError(Exception):
    """Base class for library-specific failures."""


class DomainError(EigenforgeError, ValueError):
    """Input outside an operation's documented domain."""


class IntervalMismatchError(EigenforgeError, ValueError):
    """Operands live on different intervals."""


class DegenerateInputError(EigenforgeError, ValueError):
    """Structurally degenerate input, e.g. the zero polynomial."""


class DegenerateTrialError(EigenforgeError, ValueError):
    """Trial function with a vanishing weighted norm."""


class ConstraintError(EigenforgeError, ValueError):
    """Boundary or normalization constraint violated beyond tolerance."""


class PreconditionError(EigenforgeError, ValueError):
    """Caller-visible precondition not met."""


class AccuracyError(EigenforgeError, RuntimeError):
    """Requested accuracy unattainable at the given resolution."""


class ConditioningError(EigenforgeError, RuntimeError):
    """Matrix factorization failed or definiteness was lost numerically."""


class NonConvergenceError(EigenforgeError, RuntimeError):
    """Iteration exhausted its budget without meeting the tolerance.

    Carries whatever partial progress exists: the Ritz trace for the
    eigensolver, the iteration report for the field solver.
    """

    def __init__(self, message, *, trace=None, report=None):
        super().__init__(message)
        self.trace = trace
        self.report = report


class NoLatticeError(EigenforgeError, RuntimeError):
    """Values do not sit on a common discrete lattice at the tolerance."""
