from __future__ import annotations


class FracSubspaceError(ValueError):
    """Base class for every error raised by fracsubspace."""


# special functions
class PoleError(FracSubspaceError):
    pass


class ConvergenceError(FracSubspaceError):
    pass


class QuadratureError(FracSubspaceError):
    pass


# series and fractional calculus
class DomainError(FracSubspaceError):
    pass


class UndefinedCaputo(DomainError):
    """Caputo derivative applied to a term outside its domain, e.g. t^(-alpha)."""


class VariableMismatch(FracSubspaceError):
    pass


class DependentBasis(FracSubspaceError):
    pass


class UnspecializedPoly(FracSubspaceError):
    pass


# operators
class ParseError(FracSubspaceError):
    pass


class NotInvariantError(FracSubspaceError):
    pass


# solvers
class LatticeError(FracSubspaceError):
    pass


class Inconsistent(FracSubspaceError):
    pass


class NoPowerLawSolution(FracSubspaceError):
    pass


class TruncationStall(FracSubspaceError):
    pass


class StepError(FracSubspaceError):
    pass


# catalog and problem files
class UnknownExample(FracSubspaceError):
    pass


class ParamOutOfRange(FracSubspaceError):
    pass


class SchemaError(FracSubspaceError):
    pass


def annotate(err: FracSubspaceError, where: str) -> FracSubspaceError:
    """Return a copy of err of the same class with a location prefix."""
    return type(err)(f"{where}: {err}")
