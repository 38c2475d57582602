"""Cyclic redundancy checks over GF(2).

Conventions: MSB-first bit order, register initialised to ``init``, remainder XORed with
``final_xor`` (both zero by default). With the defaults the appended word is divisible by
the generator polynomial.
"""

from typing import Union

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

from ..core.exceptions import DomainError
from ..core.types import BitVector, as_bits


def _parse_int(value: Union[int, str]) -> int:
    return int(value, 0) if isinstance(value, str) else int(value)


class CrcSpec(BaseModel):
    """CRC generator g(x) = x^degree + polynomial(x); ``polynomial`` excludes the leading term."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "crc"
    degree: int = Field(ge=1, le=64)
    polynomial: int
    init: int = 0
    final_xor: int = 0

    @field_validator("polynomial", "init", "final_xor", mode="before")
    @classmethod
    def _hex(cls, value: Union[int, str]) -> int:
        return _parse_int(value)

    @model_validator(mode="after")
    def _check_degree(self) -> "CrcSpec":
        limit = 1 << self.degree
        if not (0 <= self.polynomial < limit):
            raise ValueError(f"polynomial mask {self.polynomial:#x} does not fit degree {self.degree}")
        if self.polynomial & 1 == 0:
            raise ValueError("CRC polynomial must have a non-zero constant term")
        if not (0 <= self.init < limit and 0 <= self.final_xor < limit):
            raise ValueError("init/final_xor must fit in the register")
        return self

    @field_serializer("polynomial", "init", "final_xor")
    def _to_hex(self, value: int) -> str:
        return f"{value:#x}"

    @classmethod
    def from_full_polynomial(cls, full: Union[int, str], name: str = "crc") -> "CrcSpec":
        """Build from the polynomial including its leading term, e.g. 0xE21 for CRC-11."""
        full = _parse_int(full)
        degree = full.bit_length() - 1
        return cls(name=name, degree=degree, polynomial=full ^ (1 << degree))

    @property
    def full_polynomial(self) -> int:
        return (1 << self.degree) | self.polynomial


CRC6 = CrcSpec.from_full_polynomial(0x61, name="crc6")
CRC11 = CrcSpec.from_full_polynomial(0xE21, name="crc11")
CRC16 = CrcSpec.from_full_polynomial(0x11021, name="crc16")
CRC24C = CrcSpec.from_full_polynomial(0x1B2B117, name="crc24c")

CRC_PRESETS = {spec.name: spec for spec in (CRC6, CRC11, CRC16, CRC24C)}


def crc_remainder(msg: ArrayLike, crc: CrcSpec) -> BitVector:
    """CRC bits of ``msg`` (MSB first)."""
    bits = as_bits(msg)
    top_shift = crc.degree - 1
    mask = (1 << crc.degree) - 1
    reg = crc.init
    for b in bits.tolist():
        feedback = ((reg >> top_shift) & 1) ^ b
        reg = (reg << 1) & mask
        if feedback:
            reg ^= crc.polynomial
    reg ^= crc.final_xor
    return np.array([(reg >> (top_shift - i)) & 1 for i in range(crc.degree)], dtype=np.uint8)


def crc_append(msg: ArrayLike, crc: CrcSpec) -> BitVector:
    bits = as_bits(msg)
    return np.concatenate([bits, crc_remainder(bits, crc)])


def crc_check(word: ArrayLike, crc: CrcSpec) -> bool:
    """True iff the trailing ``crc.degree`` bits match the CRC of the leading bits."""
    bits = as_bits(word)
    if bits.size < crc.degree:
        raise DomainError(f"word of length {bits.size} is shorter than the CRC ({crc.degree})")
    payload, tail = bits[: bits.size - crc.degree], bits[bits.size - crc.degree:]
    return bool(np.array_equal(crc_remainder(payload, crc), tail))
