"""Exception hierarchy.  The CLI maps each family to its own exit code."""


class PhinlabError(Exception):
    exit_code = 1


class ParseError(PhinlabError):
    exit_code = 2


class ValidationError(PhinlabError):
    """Input data violates a structural invariant; ``invariant`` names it."""

    exit_code = 3

    def __init__(self, message: str, invariant: str | None = None):
        super().__init__(message)
        self.invariant = invariant or type(self).__name__


class PreconditionError(PhinlabError):
    exit_code = 4


class PropertyFailure(PhinlabError):
    exit_code = 5


class ZeroFrobenius(ValidationError):
    pass


class ContextMismatch(ValidationError):
    pass


class NotStable(ValidationError):
    pass


class NotFree(ValidationError):
    pass


class NotAFlag(ValidationError):
    pass


class WrongGradedRank(ValidationError):
    pass


class NotAUnit(PreconditionError):
    pass


class EigenvalueDegeneracy(PreconditionError):
    pass


class NotMarked(PreconditionError):
    pass


class NotStronglyMarked(PreconditionError):
    pass


class NoPerfectDecomposition(PreconditionError):
    pass


class SingularConstantTerm(PreconditionError):
    pass


class IndexOutOfRange(PreconditionError):
    pass
