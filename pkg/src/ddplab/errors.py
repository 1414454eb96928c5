"""Exception types shared across the package."""


class DDPError(Exception):
    """Base class for every error raised by ddplab."""


class CapExceeded(DDPError):
    pass


class ArityMismatch(DDPError):
    pass


class ParseError(DDPError):
    def __init__(self, lineno, reason):
        self.lineno = lineno
        self.reason = reason
        super().__init__(f"line {lineno}: {reason}")


class BadArity(DDPError):
    pass


class NotSatisfying(DDPError):
    pass


class InvalidSolution(DDPError):
    pass


class BadRatio(DDPError):
    pass


class UnequalClasses(DDPError):
    pass


class NotAClique(DDPError):
    pass


class NotMinimal(DDPError):
    pass


class NoGapFound(DDPError):
    pass


class RestrictedUnsupported(DDPError):
    pass


class InvalidDecomposition(DDPError):
    pass


class BudgetExceeded(DDPError):
    pass


class TerminalVertex(DDPError):
    pass


class PreconditionFailed(DDPError):
    pass


class TripleTooSmall(DDPError):
    pass


class NoFreePairAvailable(DDPError):
    pass


class UnsoundDeletion(DDPError):
    """The oracle disagreed with a vertex the pipeline wanted to delete."""
