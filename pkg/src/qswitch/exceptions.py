class QSwitchError(Exception):
    """Base class for errors raised by qswitch."""


class ValidationError(QSwitchError, ValueError):
    """An input violates a documented precondition."""


class DimensionError(ValidationError):
    """Operands have incompatible shapes."""


class InsufficientDataError(QSwitchError, ValueError):
    """Measurement data cannot determine a state (e.g. a basis with no counts)."""
