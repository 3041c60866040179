"""Error types raised by the numerical services."""


class CRSSError(Exception):
    """Base class for all toolkit errors."""


class InvalidParameters(CRSSError, ValueError):
    """Exponent or index arguments outside their admissible range."""


class ResourceLimit(CRSSError):
    """A requested grid or basis exceeds the configured resource guard."""


class PoleSingularity(CRSSError):
    """A point hit the south pole, where the inverse Cayley map is undefined."""

    def __init__(self, message: str, position: int = -1):
        super().__init__(message)
        self.position = position


class SingularDiagonal(CRSSError):
    """A fundamental-solution kernel was evaluated on its diagonal."""


class DomainViolation(CRSSError):
    """A nodewise map was applied outside its domain (e.g. log of a nonpositive value)."""


class NegativeFunction(DomainViolation):
    """A functional that requires f >= 0 received negative values."""


class NotNormalized(CRSSError):
    """A density is not normalized to mean integral one."""


class ZeroFunction(CRSSError):
    """A normalized functional received an identically vanishing function."""


class RankDeficiency(CRSSError):
    """A harmonic block has a detected dimension different from dim H_{j,k}."""


class KernelModePresent(CRSSError):
    """An inverse multiplier met energy on a mode where the multiplier vanishes."""


class NotPluriharmonic(CRSSError):
    """A function carries energy outside the CR-pluriharmonic modes."""


class PreconditionViolation(CRSSError):
    """Mean or size preconditions of a functional do not hold."""


class NonConvergence(CRSSError):
    """No optimizer start met the convergence certificate."""


class ReportWriteError(CRSSError):
    """A report or table could not be written."""
