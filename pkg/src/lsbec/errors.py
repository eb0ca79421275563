"""Exception hierarchy; the CLI maps these onto exit codes."""


class LSModelError(Exception):
    """Base class for all package errors."""


class ParameterError(LSModelError, ValueError):
    """A numeric parameter is outside its admissible range."""


class ValidationError(LSModelError, ValueError):
    """User-supplied data (points, references, configs) is malformed."""


class DomainError(LSModelError, ValueError):
    """The requested quantity does not exist for these inputs."""


class InsufficientSpectrumError(LSModelError):
    """The computed spectrum does not reach far enough in energy."""


class ResourceCapError(LSModelError):
    """A request would exceed a configured safety cap."""


class FitError(LSModelError):
    """Not enough usable points for a regression."""
