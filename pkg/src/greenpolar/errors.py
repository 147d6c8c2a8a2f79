"""Exception types shared across the toolkit."""


class ConfigurationError(RuntimeError):
    """A required evaluator, profile, or resource is missing or unusable."""


class SamplingError(RuntimeError):
    """Rejection sampling could not produce the requested points."""


class ComparisonError(RuntimeError):
    """A covering-transform witness failed its inclusion check."""
