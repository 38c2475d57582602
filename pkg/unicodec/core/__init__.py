from .config import Config
from .exceptions import (
    ConfigError,
    ConstructionError,
    DomainError,
    ParseError,
    SimulationError,
    UnicodecException,
)
from .types import LLR_SATURATION, BitVector, ChannelSpec, LlrVector, SeedSpec, as_bits, as_llrs, seed_generator
from .channel import ebn0_to_sigma, hard_decision, sigma_to_ebn0, transmit_bpsk_awgn
from .decoder import DecodeOutcome, Decoder
from .log import configure_logging

__all__ = [
    "Config",
    "UnicodecException",
    "DomainError",
    "ConstructionError",
    "ParseError",
    "ConfigError",
    "SimulationError",
    "LLR_SATURATION",
    "BitVector",
    "LlrVector",
    "ChannelSpec",
    "SeedSpec",
    "as_bits",
    "as_llrs",
    "seed_generator",
    "ebn0_to_sigma",
    "sigma_to_ebn0",
    "transmit_bpsk_awgn",
    "hard_decision",
    "DecodeOutcome",
    "Decoder",
    "configure_logging",
]
