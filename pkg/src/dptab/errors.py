"""Validation error classes and their process exit codes.

Validation failures name the offending file, line, and field. They are
reported only on the operator's console and log; on any failure the
pipeline never starts and no output is produced.
"""


class ValidationFailure(Exception):
    """Base class for input validation failures."""

    def __init__(self, message: str, file: str = "", line: int = 0, field: str = ""):
        self.file = file
        self.line = line
        self.field = field
        location = file
        if line:
            location += f":{line}"
        if field:
            location += f" [{field}]"
        super().__init__(f"{location}: {message}" if location else message)


class SchemaError(ValidationFailure):
    """A file does not conform to its declared schema."""


class UniverseError(ValidationFailure):
    """A value falls outside the declared code universe."""


class ReferentialError(ValidationFailure):
    """A reference to a geographic entity or iteration that does not exist."""


class ConfigError(ValidationFailure):
    """An inconsistent run configuration, including budget mismatches."""


EXIT_CODES = {
    SchemaError: 2,
    UniverseError: 3,
    ReferentialError: 4,
    ConfigError: 5,
}
"""Distinct nonzero exit code per validation error class."""

EXIT_BUDGET_EXCEEDED = 6
"""Exit code when a release would exceed the declared privacy budget."""


def exit_code_for(error: Exception) -> int:
    for cls, code in EXIT_CODES.items():
        if isinstance(error, cls):
            return code
    return 1
