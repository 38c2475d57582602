"""Shared value types: bit and LLR vectors, channel and seed descriptors.

LLR convention (all modules): natural log, positive favours bit 0,
``llr = log P(b=0|y) / P(b=1|y)``.
"""

from typing import Literal, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .exceptions import DomainError

BitVector = NDArray[np.uint8]
LlrVector = NDArray[np.float64]

# "infinite" confidence for frozen / shortened / known bits
LLR_SATURATION = 1e30


def as_bits(bits: ArrayLike) -> BitVector:
    """Validate and convert to a uint8 vector of 0/1 values."""
    arr = np.asarray(bits)
    if arr.ndim != 1:
        raise DomainError(f"bit vector must be one-dimensional, got shape {arr.shape}")
    if arr.size and not np.all((arr == 0) | (arr == 1)):
        raise DomainError("bit vector contains values other than 0 and 1")
    return arr.astype(np.uint8, copy=False)


def as_llrs(llr: ArrayLike) -> LlrVector:
    arr = np.asarray(llr, dtype=np.float64)
    if arr.ndim != 1:
        raise DomainError(f"LLR vector must be one-dimensional, got shape {arr.shape}")
    if np.any(np.isnan(arr)):
        raise DomainError("LLR vector contains NaN")
    return np.clip(arr, -LLR_SATURATION, LLR_SATURATION)


class ChannelSpec(BaseModel):
    """Binary-input AWGN channel with BPSK mapping b -> 1 - 2b."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["BiAwgn"] = "BiAwgn"
    ebn0_db: float
    code_rate: float = Field(gt=0.0, le=1.0)

    @property
    def sigma(self) -> float:
        from .channel import ebn0_to_sigma

        return ebn0_to_sigma(self.ebn0_db, self.code_rate)


class SeedSpec(BaseModel):
    """Reproducible randomness: identical (master_seed, stream_id) replays identical draws."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    master_seed: int = Field(default=20250101, ge=0, lt=2**64)
    stream_id: int = Field(default=0, ge=0)

    @field_validator("master_seed", mode="before")
    @classmethod
    def _hex_seed(cls, value: Union[int, str]) -> int:
        if isinstance(value, str):
            return int(value, 0)
        return value

    def child(self, index: int) -> "SeedSpec":
        """Derive an independent stream; used for per-worker and per-point streams."""
        return SeedSpec(master_seed=self.master_seed, stream_id=self.stream_id * 1_000_003 + index + 1)

    def generator(self, *keys: int) -> np.random.Generator:
        """PCG64 generator fed by ``SeedSequence(master_seed, spawn_key=(stream_id, *keys))``."""
        seq = np.random.SeedSequence(entropy=self.master_seed, spawn_key=(self.stream_id, *keys))
        return np.random.Generator(np.random.PCG64(seq))


def seed_generator(seed: SeedSpec) -> np.random.Generator:
    return seed.generator()
