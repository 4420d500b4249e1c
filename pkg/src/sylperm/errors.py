"""Exception types shared across the package."""


class SizeLimitError(ValueError):
    """Input exceeds a configured size cap."""


class ConsistencyError(ArithmeticError):
    """An internal arithmetic check failed; indicates a bug, not bad input."""


class MatrixParseError(ValueError):
    """Malformed matrix text."""

    def __init__(self, message, line=None, token=None):
        self.line = line
        self.token = token
        where = []
        if line is not None:
            where.append(f"line {line}")
        if token is not None:
            where.append(f"token {token!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
