"""Exception hierarchy shared by all modules."""


class NeuronAdcError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(NeuronAdcError, ValueError):
    """An argument is outside its valid domain."""


class RangeError(NeuronAdcError, ValueError):
    """A query falls outside the span covered by the data."""


class FormatError(NeuronAdcError, ValueError):
    """A text file does not follow the expected layout."""


class ConfigurationError(NeuronAdcError, ValueError):
    """An ADC configuration is inconsistent or does not fit the input."""


class UnsupportedConfigurationError(ConfigurationError):
    """The requested operation is not defined for this configuration."""


class CalibrationError(NeuronAdcError, RuntimeError):
    """A calibration target cannot be reached."""
