"""Exception hierarchy shared by every module."""


class ImmunizeError(Exception):
    pass


class DomainError(ImmunizeError, ValueError):
    """Input outside an operation's domain (unknown node, empty seed set, ...)."""


class ParseError(DomainError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)


class ConvergenceError(ImmunizeError, RuntimeError):
    """An iterative procedure stopped before meeting its criterion.

    ``state`` carries whatever diagnostics the raiser had (last iterate,
    last resolution, counts) so callers can inspect or report them.
    """

    def __init__(self, message, **state):
        super().__init__(message)
        self.state = state
