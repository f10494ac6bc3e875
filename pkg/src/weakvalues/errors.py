"""Exception types raised by the simulator.

Every error derives from :class:`WeakValueError` so callers (and the CLI)
can catch model failures in one place. Most also derive from ``ValueError``
because they signal an argument that is out of the allowed domain.
"""


class WeakValueError(Exception):
    """Base class for all simulator errors."""


class OverlapVanishes(WeakValueError, ValueError):
    """Pre- and post-selected states are (numerically) orthogonal."""


class NotHermitian(WeakValueError, ValueError):
    pass


class DegenerateSpectrum(WeakValueError, ValueError):
    pass


class InvalidSpin(WeakValueError, ValueError):
    pass


class GridResolution(WeakValueError, ValueError):
    """Pointer width is not resolved by the grid or is truncated by it."""


class ShiftTooLarge(WeakValueError, ValueError):
    """Requested pointer shift risks periodic wraparound on the grid."""


class NormalizationUnderflow(WeakValueError, ArithmeticError):
    pass


class PostSelectionImpossible(WeakValueError, ValueError):
    pass


class WeaknessViolated(WeakValueError, ValueError):
    """Pointer spread is too small for a weak measurement."""


class UnitarityDrift(WeakValueError, ArithmeticError):
    """Integrator lost norm beyond the accepted bound."""


class ProtectionTooWeak(WeakValueError, ValueError):
    pass


class EmptyInput(WeakValueError, ValueError):
    pass


class ParseError(WeakValueError, ValueError):
    """Scenario text is not valid JSON."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


class ValidationError(WeakValueError, ValueError):
    """Scenario is valid JSON but violates a field constraint."""

    def __init__(self, field, constraint):
        self.field = field
        self.constraint = constraint
        super().__init__(f"{field}: {constraint}")
