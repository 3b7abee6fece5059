"""Refusals raised when a numerical precondition fails."""


class RefusalError(ArithmeticError):
    """A computation declined because its hypotheses do not hold."""


class DegenerateEdgeError(RefusalError):
    """The band value at the requested point is not a simple eigenvalue."""


class DegenerateMassError(RefusalError):
    """The effective form matrix is singular, so no mass tensor exists."""


class ResonanceError(RefusalError):
    """The metric energy sits on the Dirichlet lattice (pi k)^2."""
