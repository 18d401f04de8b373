"""Exception types shared across the package."""


class BenchError(Exception):
    """Base class for every error raised by guessbench."""


class ConfigError(BenchError):
    """Invalid user input: bad flags, malformed config, missing artifacts."""


class EmptyCorpusError(BenchError):
    pass


class IncompatiblePreprocessing(BenchError):
    """Two corpora were preprocessed with different settings."""
