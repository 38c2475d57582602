from .crc import CRC6, CRC11, CRC16, CRC24C, CRC_PRESETS, CrcSpec, crc_append, crc_check, crc_remainder
from .bch import (
    DVBS2_BCH_NORMAL,
    BchResult,
    BchSpec,
    GaloisField,
    bch_decode,
    bch_encode,
    dvbs2_bch,
)

__all__ = [
    "CRC6",
    "CRC11",
    "CRC16",
    "CRC24C",
    "CRC_PRESETS",
    "CrcSpec",
    "crc_append",
    "crc_check",
    "crc_remainder",
    "DVBS2_BCH_NORMAL",
    "BchResult",
    "BchSpec",
    "GaloisField",
    "bch_decode",
    "bch_encode",
    "dvbs2_bch",
]
