"""Exception hierarchy shared across the package.

The split mirrors the CLI exit codes: configuration problems (2), data
problems (3), and analysis failures (4).
"""


class LedgerflowError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(LedgerflowError):
    """Invalid configuration: bad column mapping, unknown option, bad flag."""


class DataError(LedgerflowError):
    """Malformed or inconsistent input data."""


class AnalysisError(LedgerflowError):
    """An analysis step could not complete (e.g. randomisation repair budget)."""
