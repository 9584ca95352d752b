"""Exception types shared across the package."""


class StructuralError(RuntimeError):
    """An internal invariant failed.  Signals a bug, not bad user input."""
