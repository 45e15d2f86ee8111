"""Exception types shared across the pipeline.

The CLI maps these onto its exit-code contract: ConfigError -> 2,
DataError -> 3, NonFiniteLoss -> 4.
"""


class ConfigError(Exception):
    """Bad configuration: unknown key, unparsable value, invalid combination."""


class InvalidConfig(ConfigError):
    """A structured config object failed its own validation."""


class DataError(Exception):
    """Input data violates a precondition of the operation consuming it."""


class UnknownGrade(DataError):
    """Rating symbol is not one of the 22 long-term grades."""


class OutOfRange(DataError):
    """Notch outside the [0, 21] scale."""


class EmptyInput(DataError):
    pass


class MixedEntity(DataError):
    """Events handed to a per-entity operation span several entities/regions."""


class NoData(DataError):
    """Aggregation had nothing to aggregate."""


class InsufficientOverlap(DataError):
    """Panels share too few months to build the requested windows."""


class TooFewValues(DataError):
    pass


class SeriesTooShort(DataError):
    pass


class DegenerateSplit(DataError):
    """A train/test split would leave one side empty."""


class LengthMismatch(DataError):
    pass


class NonFiniteLoss(Exception):
    """Training loss became NaN/inf; usually means the learning rate is too high."""

    def __init__(self, epoch: int):
        super().__init__(f"loss became non-finite at epoch {epoch}")
        self.epoch = epoch
