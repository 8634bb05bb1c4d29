"""Exception types shared across the package."""


class DegenerateInputError(ValueError):
    """Input is numerically degenerate (zero norm, constant data, ...)."""


class FileFormatError(ValueError):
    """On-disk artifact does not match the expected binary layout."""


class TruncatedFileError(FileFormatError):
    """File ended before the declared payload was complete."""


class NonFiniteLossError(ArithmeticError):
    """A training objective produced NaN or Inf."""

    def __init__(self, name: str, stage: str, epoch: int):
        super().__init__(f"loss '{name}' became non-finite at epoch {epoch} (stage: {stage})")
        self.name = name
        self.stage = stage
        self.epoch = epoch


class ConfigError(ValueError):
    """Run configuration is missing a field or holds an invalid value."""

    def __init__(self, field: str, message: str):
        super().__init__(f"config field '{field}': {message}")
        self.field = field
