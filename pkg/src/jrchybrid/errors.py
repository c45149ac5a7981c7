"""Exception hierarchy shared by all modules."""


class JrcError(Exception):
    """Base class for every error raised by this package."""


class NumericalFailure(JrcError):
    """A dense factorization did not converge."""

    def __init__(self, op, shape, cause=None):
        self.op = op
        self.shape = tuple(shape)
        msg = f"{op} failed to converge on a {self.shape[0]}x{self.shape[1]} matrix"
        if cause is not None:
            msg += f" ({cause})"
        super().__init__(msg)


class ContractViolation(JrcError, ValueError):
    """An input broke a documented precondition."""


class ConfigurationError(JrcError, ValueError):
    """A system configuration is inconsistent.

    ``violations`` holds every problem found, not just the first.
    """

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class DegenerateChannelError(JrcError):
    """All effective channel gains are zero."""


class DegenerateTargetError(JrcError):
    """The baseband target F_RF^H (rho F_DF + (1-rho) F_RD U_T) vanished."""
