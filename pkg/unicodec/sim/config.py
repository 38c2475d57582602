"""Experiment configuration files."""

import json
from pathlib import Path
from typing import Any, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..core.exceptions import ConfigError
from ..core.types import SeedSpec


class StopRule(BaseModel):
    """Per-point stopping: the first rule satisfied ends the point."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    min_frame_errors: int = Field(default=100, ge=1)
    max_frames: int = Field(default=10_000_000, ge=0)
    max_wall_seconds: Optional[float] = Field(default=None, gt=0)


class SchemeDescriptor(BaseModel):
    """Which code family and decoder to simulate, with family-specific parameters.

    ``all_zero`` overrides the family's default transmission mode: None keeps it, True
    sends the all-zero codeword (symmetric schemes only), False encodes random messages.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    family: str
    label: Optional[str] = None
    params: dict[str, Any] = Field(default_factory=dict)
    all_zero: Optional[bool] = None


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "experiment"
    scheme: SchemeDescriptor
    snr_points: list[float]
    stop: StopRule = StopRule()
    seed: SeedSpec = Field(default_factory=SeedSpec)
    workers: int = Field(default=1, ge=1)
    batch_frames: int = Field(default=32, ge=1)

    @field_validator("snr_points")
    @classmethod
    def _increasing(cls, points: list[float]) -> list[float]:
        if not points:
            raise ValueError("snr_points must not be empty")
        if any(b <= a for a, b in zip(points, points[1:])):
            raise ValueError("snr_points must be strictly increasing")
        return points

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ExperimentConfig":
        """Load a JSON experiment file; every problem surfaces as ConfigError."""
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"{path}: cannot read config: {exc.strerror or exc}") from exc
        try:
            return cls.model_validate_json(text)
        except ValidationError as exc:
            raise ConfigError(f"{path}: invalid experiment config\n{exc}") from exc

    def to_file(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.write_text(self.model_dump_json(indent=2) + "\n")
        return path

    @staticmethod
    def schema_text() -> str:
        return json.dumps(ExperimentConfig.model_json_schema(), indent=2)
