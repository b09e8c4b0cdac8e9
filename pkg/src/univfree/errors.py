"""Exception hierarchy shared by every module."""


class AlgebraError(ValueError):
    """Bad argument: arity/index mismatch, signature mismatch, malformed table."""


class SignatureMismatch(AlgebraError):
    pass


class NotACongruence(AlgebraError):
    """A partition failed compatibility.

    ``violation`` is ``(op_index, args, other_args)``: the two argument tuples
    are coordinatewise related, but their images are not.
    """

    def __init__(self, message, violation=None):
        super().__init__(message)
        self.violation = violation


class ResourceGuardError(RuntimeError):
    """A named resource guard was exceeded."""

    def __init__(self, guard, value, limit):
        super().__init__(f"{guard} exceeded: {value} > {limit}")
        self.guard = guard
        self.value = value
        self.limit = limit


class PreconditionError(RuntimeError):
    """An operation's mathematical precondition does not hold.

    ``witness`` carries whatever evidence the failed check produced.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
