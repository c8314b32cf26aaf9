from __future__ import annotations


class CascadeError(Exception):
    """Base class for every error raised by hdrelay."""


class InvalidSpecError(CascadeError, ValueError):
    pass


class InvalidWordError(CascadeError, ValueError):
    pass


class WordLengthError(CascadeError, ValueError):
    pass


class BudgetError(CascadeError, ValueError):
    pass


class InvalidProfileError(CascadeError, ValueError):
    pass


class DomainError(CascadeError, ValueError):
    """An entropy expression was evaluated outside its domain."""


class ConvergenceError(CascadeError, RuntimeError):
    pass


class BracketError(CascadeError, RuntimeError):
    """The capacity residual does not change sign over [0, log2(q+1)]."""


class EnumerationLimitError(CascadeError, ValueError):
    pass


class CodeConstructionError(CascadeError, ValueError):
    pass


class CollisionError(CascadeError, RuntimeError):
    pass


class DecodeError(CascadeError, RuntimeError):
    pass


class UnsupportedInstanceError(CascadeError, ValueError):
    pass


class TreeSpecError(CascadeError, ValueError):
    pass


class ConfigError(CascadeError, ValueError):
    pass
