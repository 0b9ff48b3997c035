"""Exception hierarchy shared by every module."""


class DigitfnError(Exception):
    """Base class for all library errors."""


class ValidationError(DigitfnError, ValueError):
    """Malformed input: a digit outside its alphabet, a bad matrix, a shape mismatch."""


class DomainError(DigitfnError, ValueError):
    """A number outside the interval a representation or function is defined on."""


class RefusalError(DigitfnError):
    """The request is well formed but deliberately not served (size guards, unsupported shapes)."""


class NonPeriodicError(DigitfnError):
    """Digit extraction did not become periodic within the allowed depth."""
