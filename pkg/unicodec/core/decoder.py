"""Decoder base class and decoding outcome."""

from abc import ABC, abstractmethod
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .types import LlrVector


class DecodeOutcome(BaseModel):
    """Result of one decoding call.

    ``message`` holds the payload (CRC removed when a CRC is present), ``codeword`` the full
    code-domain estimate. ``metric`` is the path metric (SCL), correlation (AED) or the sum of
    |posterior| (BP); ``crc_ok`` is True when no CRC is present.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    message: np.ndarray
    codeword: np.ndarray
    metric: float = 0.0
    crc_ok: bool = True
    iterations: Optional[int] = None
    converged: Optional[bool] = None
    operations: int = 0
    extra: dict[str, Any] = Field(default_factory=dict)


class Decoder(ABC):
    """Base class for decoders"""

    def __init__(self, name: str):
        self.name = name

    @abstractmethod
    def decode(self, llr: LlrVector) -> DecodeOutcome:
        """Decode one frame of channel LLRs"""
        pass

    def describe(self) -> dict[str, Any]:
        """Parameters worth recording next to simulation results"""
        return {"decoder": self.name}

    def __str__(self):
        return f"{type(self).__name__}(name={self.name})"

    def __repr__(self) -> str:
        return self.__str__()
