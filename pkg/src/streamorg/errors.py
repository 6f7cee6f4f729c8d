"""Shared exception types. The CLI maps them onto exit codes (2 config, 3 data)."""


class ConfigError(ValueError):
    """Invalid experiment or pipeline configuration."""


class DataError(ValueError):
    """Problem with user-supplied data (corpus, vectors, labels)."""


class CorpusError(DataError):
    """Malformed corpus file; the message names the offending line."""


class DuplicateDocumentError(DataError):
    """A document id was presented as new more than once."""


class UnknownDocumentError(DataError):
    """An operation referenced a document id that was never seen."""


class VectorFileError(DataError):
    """Malformed word-vector file; the message names the offending line."""
