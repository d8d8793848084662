from fedsvg_runtime.domain.common.errors import (
    ConfigValidationError,
    DegenerateSampleError,
    FedSvgError,
    FormatError,
    MissingArtifactError,
    NonFiniteLossError,
    ShapeMismatchError,
    SpecValidationError,
)

__all__ = [
    "ConfigValidationError",
    "DegenerateSampleError",
    "FedSvgError",
    "FormatError",
    "MissingArtifactError",
    "NonFiniteLossError",
    "ShapeMismatchError",
    "SpecValidationError",
]
