"""Exception hierarchy. Everything derives from ``ValueError`` so callers that
only care about bad input can catch that."""


class EdrlabError(ValueError):
    pass


class DimensionMismatchError(EdrlabError):
    pass


class NotHermitianError(EdrlabError):
    pass


class NotPSDError(EdrlabError):
    pass


class NotUnitaryError(EdrlabError):
    pass


class ValidationError(EdrlabError):
    """A domain object failed one of its structural invariants."""


class PreconditionError(EdrlabError):
    """A relation was asked for on inputs outside its domain of validity."""


class InconsistentInputError(EdrlabError):
    """A quantity that is nonnegative in exact arithmetic came out clearly negative."""
