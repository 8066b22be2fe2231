"""Exception hierarchy shared by all rzlab modules."""


class RZLabError(Exception):
    """Base class for every error raised by rzlab."""


class InputError(RZLabError):
    """Malformed user input (bad JSON, inconsistent parameters)."""


class InvalidEisenstein(InputError):
    pass


class ReducibleUnramifiedPoly(InputError):
    pass


class NotAUnit(RZLabError):
    pass


class PrecisionExhausted(RZLabError):
    """A result would be known to fewer digits than the operation needs."""


class UnsupportedModularity(RZLabError):
    pass


class LiftStall(RZLabError):
    """Newton lifting did not converge at the available precision."""


class CaseInapplicable(RZLabError):
    pass


class TruncatedTail(RZLabError):
    """A tail component reaches the unexpanded boundary of the ball."""


class NotRUCase(RZLabError):
    pass


class DerivationMismatch(RZLabError):
    """Derived deformation relations differ from the reference list as ideals."""


class SingularGramError(RZLabError):
    pass
