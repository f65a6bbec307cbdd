"""Exception taxonomy shared by all stages.

The CLI maps these onto exit codes: ConfigError (and subclasses) exit with 2,
every other DomainSieveError exits with 1.
"""


class DomainSieveError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(DomainSieveError):
    """Invalid configuration: unknown key, out-of-range value, missing path."""


class FingerprintError(ConfigError):
    """A model was paired with a vocabulary it was not trained against."""


class CorpusFormatError(DomainSieveError):
    """Malformed corpus input: bad encoding, bad tsv row, length mismatch."""


class FileFormatError(DomainSieveError):
    """Malformed artifact file (vocabulary, model, dataset, scores)."""


class DataError(DomainSieveError):
    """Data does not support the requested operation (too few sentences,
    a single-class training set, a degenerate calibration set, ...)."""
