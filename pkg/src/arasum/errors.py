"""Exception types shared across the pipeline."""


class ArasumError(Exception):
    """Base class for all library errors."""


class ConfigError(ArasumError):
    """Invalid configuration value or combination."""


class DataError(ArasumError):
    """Problem with input data files or streams."""


# tokenizer
class EmptyCorpus(DataError):
    pass


class VocabTooSmall(ConfigError):
    pass


class InvalidId(ArasumError):
    pass


# model
class SequenceTooLong(ArasumError):
    pass


class AllPadTarget(ArasumError):
    pass


# optim
class NonFiniteGradient(ArasumError):
    pass


class StepOutOfRange(ArasumError):
    pass


class EmptyDataset(DataError):
    pass


# data
class MalformedLine(DataError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class MissingField(DataError):
    def __init__(self, lineno, field):
        super().__init__(f"line {lineno}: missing field {field!r}")
        self.lineno = lineno
        self.field = field


class SpecInfeasible(ConfigError):
    pass


class InsufficientData(DataError):
    pass


# metrics
class LengthMismatch(ArasumError):
    pass


class SummaryTooShort(ArasumError):
    pass
