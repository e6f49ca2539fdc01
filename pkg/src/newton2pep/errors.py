"""Exception types shared across the package."""


class Newton2PepError(Exception):
    """Base class for errors raised by this package."""


class NonSquareError(Newton2PepError):
    """A square matrix was required."""


class BasisMismatchError(Newton2PepError):
    """An operation received a polynomial or pencil with the wrong basis tag."""


class NodeMismatchError(Newton2PepError):
    """Two Newton-basis objects were combined but carry different nodes."""


class SingularPencilError(Newton2PepError):
    """A generalized eigenvalue problem has a singular pencil (common nullspace)."""


class AdmissibilityError(Newton2PepError):
    """Free parameters violate the nonsingularity condition on the Z block."""


class DegenerateProblemError(Newton2PepError):
    """The input is too degenerate for the requested check to be conclusive."""


class SharedFactorError(DegenerateProblemError):
    """A polynomial pair has a common factor: infinitely many common zeros."""
