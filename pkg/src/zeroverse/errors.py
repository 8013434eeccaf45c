"""Exception types shared across the package."""


class ZeroverseError(Exception):
    pass


class InvalidParameter(ZeroverseError, ValueError):
    """A function argument is outside its documented domain."""


class InvalidConfig(ZeroverseError, ValueError):
    """A configuration document is inconsistent (e.g. probabilities do not sum to one)."""


class InvalidInput(ZeroverseError, ValueError):
    """Input data violates a precondition (e.g. an open mesh passed to a boolean)."""


class BooleanFailure(ZeroverseError):
    """Boolean difference could not produce a closed result, even after jittered retries."""
