class ConfigError(ValueError):
    """Invalid parameters or scenario configuration."""


class EmptyBandWarning(UserWarning):
    """A requested frequency band contains no spectrum bins."""


class TruncatedBandWarning(UserWarning):
    """An adjacent channel extends past Nyquist and was cut short."""
