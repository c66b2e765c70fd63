"""Exception hierarchy shared by the solver modules and the CLI."""


class NanofiberCQEDError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(NanofiberCQEDError):
    """Bad scenario or configuration input."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SolverError(NanofiberCQEDError):
    """A numerical routine could not produce a trustworthy answer."""


class NoGuidedMode(SolverError):
    pass


class MultiMode(SolverError):
    pass


class SurfaceCutoff(SolverError):
    pass


class TruncationTooSmall(SolverError):
    pass


class SingularSystem(SolverError):
    pass


class TruncationNotConverged(SolverError):
    pass


class StepTooLarge(SolverError):
    pass


class G2Undefined(SolverError):
    pass


class DegenerateDenominator(SolverError):
    pass


class ExpansionDomain(UserWarning):
    """Detuning is outside the first-order expansion of the round-trip phase."""
