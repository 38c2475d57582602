"""Bi-AWGN channel, SNR conversion and hard decisions."""

import math
from fractions import Fraction
from typing import Optional, Union

import numpy as np
from numpy.typing import ArrayLike

from .exceptions import DomainError
from .types import LLR_SATURATION, BitVector, ChannelSpec, LlrVector, SeedSpec, as_bits

Rate = Union[float, Fraction]


def ebn0_to_sigma(ebn0_db: float, rate: Rate) -> float:
    """Noise standard deviation for BPSK at the given Eb/N0 (dB) and code rate.

    sigma = sqrt(1 / (2 R 10^(ebn0/10)))
    """
    rate = float(rate)
    if not (0.0 < rate <= 1.0):
        raise DomainError(f"code rate must lie in (0, 1], got {rate}")
    return math.sqrt(1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0)))


def sigma_to_ebn0(sigma: float, rate: Rate) -> float:
    if sigma <= 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    return 10.0 * math.log10(1.0 / (2.0 * float(rate) * sigma * sigma))


def bpsk(codeword: ArrayLike) -> np.ndarray:
    return 1.0 - 2.0 * as_bits(codeword).astype(np.float64)


def awgn_llr(received: np.ndarray, sigma: float) -> LlrVector:
    """Channel LLRs 2y/sigma^2, saturated at +/-LLR_SATURATION."""
    if sigma <= 0:
        return np.where(received >= 0, LLR_SATURATION, -LLR_SATURATION).astype(np.float64)
    return np.clip(2.0 * received / (sigma * sigma), -LLR_SATURATION, LLR_SATURATION)


def transmit_bpsk_awgn(
    codeword: ArrayLike,
    channel: ChannelSpec,
    seed: SeedSpec,
    rng: Optional[np.random.Generator] = None,
) -> LlrVector:
    """Send a codeword over the Bi-AWGN channel and return the channel LLRs.

    Args:
        codeword: Code bits.
        channel: Channel description (kind must be BiAwgn).
        seed: Seed of the noise stream. Ignored when ``rng`` is given.
        rng: Running generator owned by the caller (simulation workers draw many frames from
            one stream).

    Returns:
        LLR_i = 2 y_i / sigma^2 with y = (1 - 2c) + n, n ~ N(0, sigma^2).
    """
    if channel.kind != "BiAwgn":
        raise DomainError(f"unsupported channel kind {channel.kind!r}")
    symbols = bpsk(codeword)
    sigma = channel.sigma
    gen = rng if rng is not None else seed.generator()
    received = symbols + sigma * gen.standard_normal(symbols.size)
    return awgn_llr(received, sigma)


def hard_decision(llr: ArrayLike) -> BitVector:
    """bit = 0 iff llr >= 0 (a zero LLR decides 0)."""
    return (np.asarray(llr) < 0).astype(np.uint8)
