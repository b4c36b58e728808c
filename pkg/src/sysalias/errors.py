"""Exception and warning classes.

Two families matter to callers (and to the CLI exit-code contract):

* :class:`SysAliasError` -- a mathematical failure on valid input
  (singular or defective matrices, missing logarithms, rank problems).
* :class:`ValidationError` -- malformed input: wrong shapes, bad files,
  non-finite entries.
"""


class SysAliasError(Exception):
    """Base class for numerical/mathematical failures."""


class ValidationError(ValueError):
    """Input does not satisfy the structural requirements of an operation."""


class DimensionMismatch(ValidationError):
    pass


class BranchLengthMismatch(ValidationError):
    pass


class SingularInput(SysAliasError):
    """Matrix has an eigenvalue at (numerically) zero; no logarithm exists."""


class DefectiveMatrix(SysAliasError):
    """Eigenvector matrix is too ill-conditioned; treated as non-diagonalizable."""


class NegativeRealEigenvalue(SysAliasError):
    """An eigenvalue lies on the closed negative real axis."""


class NonRealResult(SysAliasError):
    """A real logarithm was requested but the branch is not conjugate symmetric."""


class SingularResolvent(SysAliasError):
    pass


class GapNotPositive(SysAliasError):
    pass


class NotIdentifiable(SysAliasError):
    pass


class StackSingular(SysAliasError):
    pass


class TooFewSamples(SysAliasError):
    pass


class RankDeficientData(SysAliasError):
    pass


class EmptyAliasSet(SysAliasError):
    pass


class ConditionViolated(UserWarning):
    """Recovered perturbation leaves the invariant output subspace."""


class TieWarning(UserWarning):
    """Several equivalence classes attain the minimal L0 count."""


class ApproximateMembership(UserWarning):
    """Alias membership is only approximate because the data are noisy."""


class FullRankWarning(UserWarning):
    """Krylov matrix of a single-trajectory design is rank deficient."""
