"""Simulation results and their confidence intervals."""

import math
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field
from scipy.stats import norm

# two-sided 95% normal quantile
Z95 = float(norm.ppf(0.975))


def wilson_interval(errors: int, trials: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion; (0, 1) when nothing was observed."""
    if trials <= 0:
        return 0.0, 1.0
    p = errors / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z2 / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


class PointResult(BaseModel):
    model_config = ConfigDict(extra="forbid")

    ebn0_db: float
    frames: int = 0
    frame_errors: int = 0
    bit_errors: int = 0
    bits_total: int = 0
    fer: float = 0.0
    ber: Optional[float] = None
    ci_low: Optional[float] = None
    ci_high: Optional[float] = None
    seconds: float = 0.0
    termination: Optional[str] = None
    iterations: dict[int, int] = Field(default_factory=dict)

    @classmethod
    def from_counts(cls, ebn0_db: float, frames: int, frame_errors: int, bit_errors: int,
                    payload_bits: int, seconds: float = 0.0, termination: Optional[str] = None,
                    iterations: Optional[dict[int, int]] = None) -> "PointResult":
        bits_total = frames * payload_bits
        lo, hi = wilson_interval(frame_errors, frames)
        return cls(
            ebn0_db=ebn0_db,
            frames=frames,
            frame_errors=frame_errors,
            bit_errors=bit_errors,
            bits_total=bits_total,
            fer=frame_errors / frames if frames else 0.0,
            ber=bit_errors / bits_total if bits_total else 0.0,
            ci_low=lo,
            ci_high=hi,
            seconds=seconds,
            termination=termination,
            iterations=dict(sorted((iterations or {}).items())),
        )


class SimResult(BaseModel):
    """One scheme over an SNR grid; ``kind="bound"`` marks analytic reference curves."""

    model_config = ConfigDict(extra="forbid")

    scheme: str
    kind: Literal["simulation", "bound"] = "simulation"
    family: Optional[str] = None
    payload_bits: int = 0
    code_length: int = 0
    rate: float = 0.0
    points: list[PointResult] = Field(default_factory=list)
    config: Optional[dict[str, Any]] = None

    @property
    def ebn0_db(self) -> list[float]:
        return [p.ebn0_db for p in self.points]

    @property
    def fer(self) -> list[float]:
        return [p.fer for p in self.points]
