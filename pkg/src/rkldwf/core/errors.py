"""
Exception hierarchy shared by every rkldwf module.

Solver aborts are not exceptions; see ``rkldwf.solver.runner.AbortRecord``.
"""


class PhaseRetrievalError(Exception):
    """Root of all rkldwf errors."""


class ArgumentError(PhaseRetrievalError, ValueError):
    """Invalid argument: shape mismatch, out-of-range parameter, degenerate input."""


class ConfigError(ArgumentError):
    """Invalid configuration document or unknown preset."""

    def __init__(self, message: str, key: str = "", path: str = ""):
        super().__init__(message)
        self.key = key
        self.path = path


class ArrayFileError(PhaseRetrievalError):
    """Malformed ComplexArrayFile."""

    kind = "array_file_error"

    def __init__(self, message: str, path: str = ""):
        super().__init__(message)
        self.path = path


class BadMagicError(ArrayFileError):
    kind = "bad_magic"


class UnsupportedVersionError(ArrayFileError):
    kind = "unsupported_version"


class UnsupportedDtypeError(ArrayFileError):
    kind = "unsupported_dtype"


class TruncatedPayloadError(ArrayFileError):
    kind = "truncated_payload"
