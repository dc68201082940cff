"""Exception types shared across the package."""


class LevelSetError(Exception):
    """Base class for all package errors."""


class ParseError(LevelSetError, ValueError):
    """Malformed polynomial, moment, or family input."""


class NotCompact(LevelSetError):
    """The sublevel set {g <= 1} is unbounded (g not positive on the sphere)."""


class DegenerateSampling(LevelSetError):
    """Monte Carlo sampling accepted too few points to form an estimate."""


class SingularMatrix(LevelSetError):
    """The recovery system is singular or too ill-conditioned to trust."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class MissingMoment(LevelSetError, KeyError):
    """Moments required by a recovery system are absent."""

    def __init__(self, missing):
        self.missing = [tuple(a) for a in missing]
        super().__init__(self.missing)

    def __str__(self):
        shown = ", ".join(str(a) for a in self.missing[:20])
        more = "" if len(self.missing) <= 20 else f" (+{len(self.missing) - 20} more)"
        return f"missing moments for alpha in {{{shown}}}{more}"


class UnderdeterminedFamily(LevelSetError, ValueError):
    """An index family has fewer equations than unknown coefficients."""
