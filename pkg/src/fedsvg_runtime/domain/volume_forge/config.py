from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, model_validator

MODALITIES: tuple[str, ...] = ("T1", "T1ce", "T2", "FLAIR")


class ModalityContrast(BaseModel):
    """Intensity model of one modality in normalized [0, 1] units."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    tissue_mean: float = Field(ge=0.0, le=1.0)
    tumor_delta: float = Field(ge=-1.0, le=1.0)
    noise_sd: float = Field(ge=0.0)


def _default_contrast() -> dict[str, ModalityContrast]:
    return {
        "T1": ModalityContrast(tissue_mean=0.45, tumor_delta=0.04, noise_sd=0.04),
        "T1ce": ModalityContrast(tissue_mean=0.40, tumor_delta=0.08, noise_sd=0.04),
        "T2": ModalityContrast(tissue_mean=0.35, tumor_delta=0.30, noise_sd=0.04),
        "FLAIR": ModalityContrast(tissue_mean=0.30, tumor_delta=0.35, noise_sd=0.04),
    }


class SynthSpec(BaseModel):
    """Parameters of the synthetic multimodal volume generator."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    n_volumes: int = Field(default=8, ge=1)
    dims: tuple[int, int, int] = (32, 32, 32)
    tumor_count_range: tuple[int, int] = (1, 2)
    tumor_radius_range: tuple[float, float] = (3.0, 5.0)
    # lobes per tumor; each lobe is one ellipsoid of the union
    lobes_range: tuple[int, int] = (1, 3)
    # relative semi-axis jitter; 0 gives spheres
    tumor_anisotropy: float = Field(default=0.3, ge=0.0, lt=1.0)
    # semi-axes of the skull-stripped brain as a fraction of the half-dims; None = no background
    brain_radius_fraction: float | None = Field(default=0.9, gt=0.0, le=1.0)
    modality_contrast: dict[str, ModalityContrast] = Field(default_factory=_default_contrast)
    seed: int = Field(default=20240601, ge=0, lt=1 << 64)

    @model_validator(mode="after")
    def _check_invariants(self) -> "SynthSpec":
        if any(d < 16 for d in self.dims):
            raise ValueError(f"dims must be >= 16 per axis, got {self.dims}")
        lo, hi = self.tumor_count_range
        if lo < 0 or hi < lo:
            raise ValueError(f"tumor_count_range must satisfy 0 <= min <= max, got {self.tumor_count_range}")
        rmin, rmax = self.tumor_radius_range
        if rmin <= 0 or rmax < rmin:
            raise ValueError(f"tumor_radius_range must satisfy 0 < min <= max, got {self.tumor_radius_range}")
        lmin, lmax = self.lobes_range
        if lmin < 1 or lmax < lmin:
            raise ValueError(f"lobes_range must satisfy 1 <= min <= max, got {self.lobes_range}")
        extent = rmax * (1.0 + self.tumor_anisotropy)
        fraction = self.brain_radius_fraction or 1.0
        room = min(fraction * (d - 1) / 2.0 for d in self.dims)
        if extent > room:
            raise ValueError(f"tumor_radius_range: radius {extent:.2f} does not fit inside the volume (room {room:.2f})")
        if set(self.modality_contrast) != set(MODALITIES):
            raise ValueError(f"modality_contrast must define exactly {list(MODALITIES)}")
        weak = max(self.modality_contrast[m].tumor_delta for m in ("T1", "T1ce"))
        strong = min(self.modality_contrast[m].tumor_delta for m in ("T2", "FLAIR"))
        if strong <= weak:
            raise ValueError("modality_contrast: tumor_delta of T2 and FLAIR must exceed T1 and T1ce")
        return self
