"""Exception types shared across the package."""


class ViracheckError(Exception):
    """Base class for all package errors."""


class ModeError(ViracheckError):
    """Operands live over different scalar alphabets (concrete vs generic)."""


class DivZero(ViracheckError, ZeroDivisionError):
    """Exact division by zero."""


class NotMonomial(ViracheckError):
    """Generic-mode division requires a single-monomial divisor."""


class UnboundSymbol(ViracheckError):
    """A substitution left one of the scalar's symbols unbound."""


class InvertibleZero(ViracheckError):
    """Zero was bound to a symbol that must stay invertible."""


class CapExceeded(ViracheckError):
    """An induced-module operation produced a vector above its level cap."""


class WindowTooSmall(ViracheckError):
    """An interpolation window is shorter than the polynomial degree requires."""


class WindowBelowK(ViracheckError):
    """An interpolation window dips below the stabilization bound."""


class CriterionFailed(ViracheckError):
    """A precondition of an isomorphism check does not hold."""


class ConfigError(ViracheckError):
    """A suite configuration violates the schema."""


class ParseError(ViracheckError):
    """A report, golden file, or polynomial string failed to parse."""
