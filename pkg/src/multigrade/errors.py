"""Exception types shared across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside an operation's mathematical domain."""


class ResourceLimitError(RuntimeError):
    """A configured resource guard (index bound, exponent bound, sieve cap) was hit."""


class CertificationError(RuntimeError):
    """An internally generated object failed its own exact re-verification.

    This signals a bug in the generator, never bad user input.
    """


class ConvergenceError(RuntimeError):
    """An approximation exhausted its term budget before meeting its tolerance.

    The partial result computed so far, if any, is attached as ``partial``.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial
