"""Exception hierarchy.

Validation problems (bad input, violated preconditions) derive from
``ValidationError``; numerical failures derive from ``NumericalError``.
The CLI maps the two families to exit codes 1 and 2.
"""


class GraphNLSError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(GraphNLSError, ValueError):
    pass


class NumericalError(GraphNLSError, RuntimeError):
    pass


class GraphError(ValidationError):
    """Malformed graph description. ``element`` names the offender."""

    def __init__(self, message, element=None):
        super().__init__(message)
        self.element = element


class DuplicateEdgeError(GraphError):
    pass


class NonPositiveWeightError(GraphError):
    pass


class SelfLoopError(GraphError):
    pass


class DisconnectedGraphError(GraphError):
    pass


class IsolatedVertexError(GraphError):
    pass


class UnknownVertexError(GraphError):
    pass


class PreconditionError(ValidationError):
    pass


class IndefiniteFormError(ValidationError):
    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class MagnitudeOverflowError(NumericalError):
    def __init__(self, message, vertex=None):
        super().__init__(message)
        self.vertex = vertex


class ConvergenceError(NumericalError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NoDescentEndpointError(NumericalError):
    pass


class DegenerateCriticalPointError(NumericalError):
    def __init__(self, message, smallest_singular_value=None):
        super().__init__(message)
        self.smallest_singular_value = smallest_singular_value
