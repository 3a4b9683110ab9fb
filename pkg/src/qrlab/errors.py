"""Exception hierarchy shared by all qrlab modules."""


class QrlabError(Exception):
    """Base class for every error raised by qrlab."""


class DslSyntaxError(QrlabError):
    def __init__(self, message, line=None, column=None, token=None):
        self.line = line
        self.column = column
        self.token = token
        where = ""
        if line is not None:
            where = f" (line {line}, column {column}"
            if token is not None:
                where += f", near {token!r}"
            where += ")"
        super().__init__(message + where)


class UndeclaredParameterError(DslSyntaxError):
    pass


class GuardTypeError(DslSyntaxError):
    pass


class UnknownFixtureError(QrlabError):
    """A fixture name or fixture parameter that does not exist."""


class ParameterRangeError(QrlabError):
    pass


class DomainError(QrlabError):
    """A point lies outside the declared domain of a map."""


class CoverageGapError(QrlabError):
    """No guard of a piecewise map matches a domain point."""


class DomainSingularityError(QrlabError):
    """Division by zero or a non-differentiable abs() at an evaluation point."""


class BoundaryBandError(QrlabError):
    """A derivative was requested within the tolerance band of a guard boundary."""


class HypothesisError(QrlabError):
    """A sampled certificate for an operation's hypothesis failed."""


class DegenerateRegionError(QrlabError):
    pass


class UnresolvedError(QrlabError):
    pass
