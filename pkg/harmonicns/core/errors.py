"""Exceptions raised by HarmonicNS."""


class HarmonicNSError(Exception):
    """Base class for all HarmonicNS errors."""


class DomainError(HarmonicNSError, ValueError):
    """A point lies outside the domain of an operation."""


class RangeError(HarmonicNSError, ValueError):
    """A strip coordinate lies outside the range of an operation."""


class OutOfWindowError(DomainError):
    """A strip point lies outside the truncated grid window."""


class ConfigError(HarmonicNSError, ValueError):
    """A configuration value is invalid.

    Args:
        field (str): Name of the offending configuration field.
        message (str): What is wrong with it.

    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class SolverError(HarmonicNSError, RuntimeError):
    """A linear solve did not reach its residual tolerance."""


class VerificationError(HarmonicNSError, AssertionError):
    """A certified property failed."""
