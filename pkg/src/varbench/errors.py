"""Exception types shared across the package."""


class VarBenchError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(VarBenchError, ValueError):
    """Input data violates a precondition (lengths, signs, ordering)."""


class SplitError(VarBenchError, ValueError):
    """A train/validation/test split would produce an empty or malformed segment."""


class AlignmentError(VarBenchError, ValueError):
    """Two date-indexed series do not share the same dates."""


class SchemaError(VarBenchError, ValueError):
    """A delimited input file does not conform to its documented schema."""


class ConfigError(VarBenchError, ValueError):
    """A run configuration file is missing keys or holds invalid values."""


class UnsupportedOperationError(VarBenchError, TypeError):
    """The distribution variant does not support the requested operation."""


class FitError(VarBenchError, RuntimeError):
    """Model estimation failed; carries best-so-far diagnostics when available."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class FilterOverflowError(FitError):
    """A state recursion left the representable range (never clamped silently)."""


class OptimizationError(VarBenchError, RuntimeError):
    """Every optimizer restart failed to find a finite objective value."""
