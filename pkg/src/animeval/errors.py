"""Exception hierarchy shared across the package."""


class AnimevalError(Exception):
    """Base class for all errors raised by this package."""


class ContractViolation(AnimevalError):
    """An argument or intermediate value breaks a documented precondition."""


class ConfigurationError(AnimevalError):
    """Invalid configuration: bad weights, unknown mode, malformed config file."""


class DatasetError(AnimevalError):
    """A dataset or completions file is malformed or inconsistent."""


class MediaError(AnimevalError):
    """A video could not be opened or decoded into frames."""


class EnvironmentFailure(AnimevalError):
    """The surrounding environment is unusable: missing tools, unreadable or
    unwritable directories."""


class RendererUnavailable(EnvironmentFailure):
    """The renderer executable is missing or cannot be launched."""


class EndpointError(AnimevalError):
    """An HTTP endpoint failed after exhausting retries or returned a malformed body."""
