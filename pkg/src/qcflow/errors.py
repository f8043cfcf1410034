"""Exception types raised by qcflow."""


class QCFlowError(Exception):
    """Base class for all qcflow errors."""


class DomainError(QCFlowError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class GridMismatchError(QCFlowError, ValueError):
    """Two sampled objects live on incompatible grids."""


class NearSingularError(DomainError):
    """An evaluation point is too close to a contour for reliable quadrature."""


class BandLimitError(QCFlowError, ValueError):
    """Sampled data is not resolved by its grid (slow Fourier decay)."""


class SolverError(QCFlowError, RuntimeError):
    """An iterative solver failed to converge."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class SingularJacobianError(QCFlowError, ArithmeticError):
    """A Jacobian or denominator degenerated."""


class PositivityError(QCFlowError, ArithmeticError):
    """A Herglotz function failed the Re p > 0 check."""

    def __init__(self, message, point=None, value=None):
        super().__init__(message)
        self.point = point
        self.value = value


class UnivalenceError(QCFlowError, ArithmeticError):
    """The univalence proxy (min |f'| on the circle, simple boundary) failed."""

    def __init__(self, message, t=None, theta=None, states=None):
        super().__init__(message)
        self.t = t
        self.theta = theta
        self.states = states if states is not None else []


class CuspError(UnivalenceError):
    """A Hele-Shaw boundary developed a cusp (min |f'| below tolerance)."""

    def __init__(self, message, t=None, theta=None, states=None, blowup_time=None):
        super().__init__(message, t=t, theta=theta, states=states)
        self.blowup_time = blowup_time
