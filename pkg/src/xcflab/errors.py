"""Exception hierarchy shared by every xcflab module."""


class XCFError(Exception):
    """Base class for all xcflab errors."""


class InvalidInputError(XCFError, ValueError):
    """Input outside the accepted domain (unknown geometry, non-positive metric, ...)."""


class SingularTensorError(XCFError, ArithmeticError):
    """The raised Einstein tensor is not invertible (some sectional curvature vanishes)."""


class NotApplicableError(XCFError):
    """The requested quantity does not exist for this geometry or trajectory."""


class OutOfDomainError(XCFError, ValueError):
    """A closed-form solution was evaluated outside its interval of existence."""


class NumericalFailure(XCFError, FloatingPointError):
    """The vector field produced a non-finite value at an accepted state.

    Attributes
    ----------
    t, state:
        Last good time and metric.
    """

    def __init__(self, message, t=None, state=None):
        super().__init__(message)
        self.t = t
        self.state = state


class WindowError(XCFError, ValueError):
    """Too few samples inside a fitting window."""


class BracketError(XCFError, ValueError):
    """Bisection endpoints do not bracket a Q2 -> Q1 transition."""


class InconclusiveError(XCFError):
    """A classification returned Undetermined where a definite label was needed."""


class ClassificationFailure(XCFError):
    """Integration failed while classifying; carries the partial trajectory."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory
