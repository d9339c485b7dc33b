"""Exception hierarchy."""


class NLSKdVError(Exception):
    """Base class for all package errors."""


class GridError(NLSKdVError, ValueError):
    """Invalid grid construction or a field that does not live on the grid."""


class ParameterError(NLSKdVError, ValueError):
    """Model or wave parameters outside their admissible range."""


class ManifoldError(NLSKdVError):
    """A state that cannot be placed on (or is not on) the Nehari manifold."""


class ProfileRequiredError(NLSKdVError):
    """The fourth-order base profile is needed but was not supplied."""


class ThresholdNotFound(NLSKdVError):
    """No sign change of the energy gap inside the search bracket."""

    def __init__(self, message, bracket=None, values=None):
        super().__init__(message)
        self.bracket = bracket
        self.values = values


class SolverError(NLSKdVError):
    """A solver failed; ``report`` carries whatever diagnostics were gathered."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NoPassGeometry(SolverError):
    """The mountain-pass path maximum sits at an endpoint."""
