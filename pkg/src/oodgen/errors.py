"""Exception types shared across the package.

Callers can rely on the split: ValidationError and ParseError mean the
input was bad (usage errors at the CLI boundary), GenerationError and
TrainingError mean a well-formed request failed at runtime.
"""


class ValidationError(ValueError):
    """An input violates a documented precondition."""


class ParseError(ValueError):
    """A data, model, or manifest file is malformed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ManifestError(ValueError):
    """A manifest violates the schema, version, or checksum contract."""


class GenerationError(RuntimeError):
    """A sampler could not finish a requested sample."""

    def __init__(self, message, sample_index=None):
        super().__init__(message)
        self.sample_index = sample_index


class TrainingError(RuntimeError):
    """Detector training diverged."""

    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch
