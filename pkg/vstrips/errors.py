class ArgumentError(ValueError):
    """Invalid argument supplied."""


class NotPrimeError(ArgumentError):
    """Field characteristic is not a prime."""


class ReducibleModulusError(ArgumentError):
    """Field modulus is not a monic irreducible polynomial of the right degree."""


class FieldOverflowError(ArgumentError):
    """Field order does not fit the supported integer width."""


class DimensionMismatchError(ArgumentError):
    """Vector or coefficient list has the wrong length."""


class OutOfRangeError(ArgumentError):
    """Index or exponent vector outside the valid range."""


class DuplicateStripsError(ArgumentError):
    """Strip sequence contains the same strip twice."""


class ZeroLeadingError(ArgumentError):
    """Leading coefficient of a polynomial family is zero."""


class ConfigInvalidError(ArgumentError):
    """Simulation configuration is inconsistent."""


class ParseError(ArgumentError):
    """Malformed field or polynomial text."""


class FieldZeroDivisionError(ZeroDivisionError):
    """Inverse of zero or reduction modulo the zero polynomial."""


class HypothesisError(ValueError):
    """Arguments violate the hypothesis of a closed-form result (e.g. q <= d)."""


class StripsExhaustedError(RuntimeError):
    """Every vertical strip has already been emitted."""


class GuardExceededError(RuntimeError):
    """Enumeration would exceed the configured state budget."""


class RootFindingError(RuntimeError):
    """Equal-degree splitting did not converge within its round budget."""
