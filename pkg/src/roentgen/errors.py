"""Exception types shared across the engine."""


class RoentgenError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(RoentgenError, ValueError):
    """Tensor shapes do not conform for the requested operation."""


class FormatError(RoentgenError, ValueError):
    """A byte stream does not follow the expected file format."""


class VersionError(FormatError):
    """A model file declares a format version newer than we support."""


class CorruptionError(FormatError):
    """A model file is structurally damaged (truncated or inconsistent)."""


class MissingWeightError(RoentgenError, LookupError):
    """A layer references a weight tensor that is absent or mis-shaped."""


class TrainingError(RoentgenError, RuntimeError):
    """Training diverged; carries the epoch and batch where it happened."""

    def __init__(self, message: str, epoch: int, batch: int):
        super().__init__(message)
        self.epoch = epoch
        self.batch = batch


class TrialError(RoentgenError, RuntimeError):
    """The classifier failed on an image during an evaluation trial."""

    def __init__(self, message: str, image_id: str):
        super().__init__(message)
        self.image_id = image_id
