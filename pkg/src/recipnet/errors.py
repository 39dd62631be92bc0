"""Exception hierarchy shared across the package."""


class DomainError(ValueError):
    """An operation was called outside its domain (bad vertex, bad argument)."""


class MissingArcError(DomainError):
    """A required directed arc is not present in the graph."""


class UndefinedCorrelationError(DomainError):
    """Degree correlation is undefined (zero variance in the degree sequence).

    Raised as its own type so callers can tell a degenerate-but-valid input
    apart from an outright invalid one.
    """


class IntegrityError(RuntimeError):
    """Two structures that must agree (e.g. degree sequences) do not."""


class FormatError(ValueError):
    """An input file does not follow the documented format."""


class DegenerateInputError(ValueError):
    """Input is degenerate for the requested analysis (escalated warning)."""
