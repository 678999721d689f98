"""
Errors raised by feature-file and checkpoint input/output.
"""
from noisecleaner.errors import NoiseCleanerError


class FileIOError(NoiseCleanerError):
    """An error reading or writing a noise cleaner file.

    This is the generic error raised for feature files and tensor
    containers.  `offset` is the byte position at which parsing failed,
    when known.

    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = u"{} (at byte offset {})".format(message, offset)
        super(FileIOError, self).__init__(message)
        self.offset = offset


class FeatureFileError(FileIOError):
    """A feature file could not be parsed."""
    pass


class CheckpointFileError(FileIOError):
    """A tensor container (checkpoint) could not be parsed or does not fit the model."""
    pass
