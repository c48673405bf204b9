"""Exception hierarchy shared by all lungseg modules."""


class LungSegError(Exception):
    """Base class for all errors raised by this package."""


class ContractViolation(LungSegError):
    """Two values passed together do not fit (shape/channel mismatch)."""


class ConfigError(LungSegError):
    """A parameter or configuration value is invalid."""


class InputShapeError(LungSegError):
    """An input image has dimensions the pipeline cannot accept."""


class NumericError(LungSegError):
    """An operation produced non-finite values (overflow, NaN)."""


class ImageReadError(LungSegError):
    """An image file exists but cannot be used."""


class UndecodableImageError(ImageReadError):
    """The file is not a decodable image."""


class ChannelMismatchError(ImageReadError):
    """A multi-channel mask image has unequal channels."""


class WeightFormatError(LungSegError):
    """A weight file cannot be parsed or does not match the config."""


class WeightHeaderError(WeightFormatError):
    """Bad magic string or unsupported format version."""


class WeightTruncationError(WeightFormatError):
    """The file ends before a declared record or payload is complete."""


class WeightShapeError(WeightFormatError):
    """A record is missing, unexpected, or its shape contradicts the config."""
