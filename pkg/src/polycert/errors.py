"""Exception hierarchy shared by every module."""


class CertifyError(Exception):
    """Base class for all errors raised by polycert."""


class InputError(CertifyError, ValueError):
    """Invalid user-supplied data: wrong dimension, zero direction, bad range."""


class ParseError(InputError):
    """Malformed expression or problem file.

    ``line`` and ``column`` are 1-based when known.
    """

    def __init__(self, message, line=None, column=None, source=None):
        self.line = line
        self.column = column
        self.source = source
        self.bare_message = message
        where = []
        if source:
            where.append(str(source))
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class ResourceError(CertifyError):
    """An operation would exceed a configured size limit."""


class ContractError(CertifyError):
    """An internal precondition was violated by the caller."""
