"""Exception hierarchy shared across the pipeline."""


class WearfeatError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(WearfeatError):
    """Invalid run configuration or generator spec."""


class IngestError(WearfeatError):
    """Fatal problem while parsing a subject directory."""


class InvalidWindowError(WearfeatError):
    """A window does not satisfy its validity rule (e.g. too few samples)."""


class DegenerateSeriesError(WearfeatError):
    """Input series carries no usable variation (constant / zero variance)."""
