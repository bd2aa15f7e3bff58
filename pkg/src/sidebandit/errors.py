"""Exception types shared across the package."""


class InputError(ValueError):
    """An argument violates a documented precondition."""


class ParseError(InputError):
    """A text input file is malformed."""

    def __init__(self, message: str, path=None, lineno: int | None = None):
        self.path = path
        self.lineno = lineno
        where = ""
        if path is not None:
            where += f"{path}"
        if lineno is not None:
            where += f":{lineno}"
        super().__init__(f"{where}: {message}" if where else message)


class ConfigError(ValueError):
    """An experiment configuration is invalid or incomplete."""
