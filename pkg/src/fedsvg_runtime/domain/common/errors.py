"""Error types raised across the pipeline; the CLI reports any of them as a one-line failure."""

from __future__ import annotations


class FedSvgError(Exception):
    """Base class for errors surfaced as one-line CLI failures."""


class SpecValidationError(FedSvgError, ValueError):
    """Raised when an input value or argument is invalid."""

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field


class ConfigValidationError(FedSvgError, ValueError):
    pass


class FormatError(FedSvgError):
    """Raised on bad magic, unsupported version or truncated payload."""

    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path


class MissingArtifactError(FedSvgError):
    """Raised when prerequisite artifacts of a command are missing."""

    def __init__(self, message: str, paths: list[str] | None = None) -> None:
        super().__init__(message)
        self.paths = paths or []


class ShapeMismatchError(FedSvgError, ValueError):
    pass


class DegenerateSampleError(FedSvgError, ValueError):
    """Raised when a statistic is undefined for the given sample."""


class NonFiniteLossError(FedSvgError):
    """Raised when training produces a NaN or infinite loss."""

    def __init__(
        self, message: str, dump_path: str | None = None, context: dict | None = None
    ) -> None:
        super().__init__(message)
        self.dump_path = dump_path
        self.context = context or {}
