"""Exception hierarchy shared by every module of the package."""


class CNTError(Exception):
    """Base class for all errors raised by cnt_energy."""


class InvalidParams(CNTError, ValueError):
    pass


class DomainError(CNTError, ValueError):
    """Evaluation point outside the valid (r, theta) range of a metric."""


class NonFiniteIntegrand(CNTError, ArithmeticError):
    def __init__(self, index, theta, value):
        self.index = index
        self.theta = theta
        self.value = value
        super().__init__(
            f"integrand is not finite at node {index} (theta={theta!r}): {value!r}")


class NoConvergence(CNTError, ArithmeticError):
    def __init__(self, previous, last, n):
        self.previous = previous
        self.last = last
        self.n = n
        super().__init__(
            f"quadrature did not converge by n={n}: last values {previous!r}, {last!r}")


class ImaginaryBeta(CNTError, ArithmeticError):
    """beta^2 = 4Hl - H_theta^2 went negative: embedding data is inadmissible."""


class NonFinite(CNTError, ArithmeticError):
    pass


class BoundaryViolation(CNTError, ValueError):
    """Freedom field does not satisfy y(0)=y(pi)=0 and x'(0)=x'(pi)=0."""


class SingularXRecovery(CNTError, ArithmeticError):
    pass


class BlowUp(CNTError, ArithmeticError):
    def __init__(self, theta, x, y):
        self.theta = theta
        self.x = x
        self.y = y
        super().__init__(f"EL integration blew up at theta={theta:.6g} (x={x:.3g}, y={y:.3g})")


class NoRoot(CNTError):
    """Shooting found no sign change; ``scan`` holds the (x0, terminal_y) table."""

    def __init__(self, message, scan=None):
        self.scan = scan if scan is not None else []
        super().__init__(message)
