"""Exception hierarchy shared by all modules."""


class TplqError(Exception):
    """Base class for every error raised by this package."""


class LogParseError(TplqError):
    """Input is not well-formed XML/CSV."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + where)


class SchemaError(TplqError):
    """Input is well-formed but misses required fields or has invalid values."""


class CanonicalizationError(TplqError):
    pass


class IncrementalityError(TplqError):
    """A newer log does not extend an older one."""


class UnknownStateError(TplqError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UndefinedSuccessorError(TplqError):
    """A non-end state without outgoing transitions has no successor distribution."""


class EndOfStream(TplqError):
    """No pending events are left; publishing stops."""
