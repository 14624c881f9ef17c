"""Exception types shared across the package.

The CLI maps each subclass to a distinct process exit code, so raising the
right type at module boundaries matters.
"""


class ApselError(Exception):
    """Base class for package-specific failures."""

    exit_code = 1


class ConfigError(ApselError):
    """Invalid parameter value or malformed configuration file."""

    exit_code = 2


class DataError(ApselError):
    """Dataset cannot be loaded, validated, or transformed."""

    exit_code = 3


class SolverError(ApselError):
    """A QUBO solver failed or was asked for something it cannot do."""

    exit_code = 4


class LocalizerError(ApselError):
    """Classifier training or evaluation failed."""

    exit_code = 5
