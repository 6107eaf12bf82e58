"""Exception hierarchy.

Two families matter to callers: :class:`ValidationError` for inputs that
violate a precondition (CLI exit code 2) and :class:`NumericDegeneracy` for
inputs that sit inside a tolerance band where no decision is trustworthy
(CLI exit code 3).
"""


class AffineTorusError(Exception):
    pass


class ValidationError(AffineTorusError, ValueError):
    pass


class NumericDegeneracy(AffineTorusError, ArithmeticError):
    pass


class NonPositiveDeterminant(ValidationError):
    pass


class SingularMatrix(ValidationError):
    pass


class NotInCone(ValidationError):
    pass


class NotTriangularizable(ValidationError):
    pass


class InvalidParams(ValidationError):
    pass


class NonCommuting(ValidationError):
    pass


class NotEmbeddable(ValidationError):
    pass


class InvalidGluing(ValidationError):
    pass


class InvalidDescriptor(ValidationError):
    pass


class DegenerateLattice(InvalidDescriptor):
    pass


class NotExpansion(InvalidDescriptor):
    pass


class NonPositiveEigenvalues(InvalidDescriptor):
    pass


class ZeroLevel(InvalidDescriptor):
    pass


class WrongTag(ValidationError):
    pass


class EmptyTiling(ValidationError):
    pass


class BranchAmbiguity(NumericDegeneracy):
    pass


class Degenerate(NumericDegeneracy):
    pass


class DegenerateRank(NumericDegeneracy):
    pass
