"""Exception types shared across the package."""


class OFLError(Exception):
    """Base class for all package errors."""


class DomainError(OFLError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UsageError(OFLError, ValueError):
    """Arguments are well-formed individually but inconsistent together."""


class UnsupportedOperation(OFLError, NotImplementedError):
    """The space or action does not provide the requested oracle."""


class WordError(OFLError, ValueError):
    """A semigroup word does not match the action's composition law."""


class ConfigError(OFLError, ValueError):
    """A scenario file is malformed or references unknown catalog entries."""
