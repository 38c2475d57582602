"""Scheme base class and the built-in code/decoder families."""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..core.decoder import DecodeOutcome, Decoder
from ..core.exceptions import ConfigError
from ..core.types import BitVector, LlrVector, SeedSpec
from ..ldpc import (
    BpConfig,
    BpDecoder,
    ChainSpec,
    LdpcCode,
    WindowConfig,
    WindowedBpDecoder,
    chain_from_spec,
    code_from_matrix,
    dvbs2_like,
    load_alist,
    load_base_graph,
    load_dvbs2_table,
    nr_like_bg2,
    read_chain_spec,
)
from ..outer import CRC_PRESETS, BchSpec, bch_decode, bch_encode, dvbs2_bch
from ..polar import (
    AedDecoder,
    PolarCodeSpec,
    ScDecoder,
    SclDecoder,
    construct_aed_code,
    construct_polar_code,
    length_match_transmit,
    polar_encode,
    read_codespec,
)
from .config import SchemeDescriptor

logger = logging.getLogger(__name__)


@dataclass
class Codec:
    """A built scheme: what the simulation loop needs for one frame.

    ``encode`` maps a payload to the transmitted bits; it is None for schemes that only
    support all-zero transmission.
    """

    label: str
    payload_bits: int
    code_length: int
    rate: float
    decoder: Decoder
    encode: Optional[Callable[[BitVector], BitVector]]
    symmetric: bool

    def describe(self) -> dict[str, Any]:
        return {"label": self.label, "payload_bits": self.payload_bits, "code_length": self.code_length,
                "rate": self.rate, **self.decoder.describe()}


class Scheme(ABC):
    """Base class for simulation schemes"""

    params_model: type[BaseModel]

    def __init__(self, family: str, description: str, symmetric: bool = False):
        """
        Initialize the scheme.

        Args:
            family: Family name used in experiment files
            description: One-line description
            symmetric: Whether code and decoder are symmetric, which makes all-zero
                transmission representative of random messages
        """
        self.family = family
        self.description = description
        self.symmetric = symmetric

    @abstractmethod
    def build(self, params: BaseModel) -> Codec:
        """Construct code, encoder and decoder"""
        pass

    def get_parameters(self) -> dict[str, Any]:
        """JSON schema of the ``params`` block"""
        return self.params_model.model_json_schema()

    def parse_params(self, params: dict[str, Any]) -> BaseModel:
        try:
            return self.params_model.model_validate(params)
        except ValidationError as exc:
            raise ConfigError(f"invalid parameters for scheme '{self.family}'\n{exc}") from exc

    def codec(self, descriptor: SchemeDescriptor) -> Codec:
        codec = self.build(self.parse_params(descriptor.params))
        if descriptor.label:
            codec.label = descriptor.label
        return codec

    def __str__(self):
        return f"{type(self).__name__}(family={self.family})"


# ---------------------------------------------------------------------------
# polar families


class PolarParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    N: int = 256
    # counts CRC bits
    K: int = 128
    crc: Optional[str] = None
    design_snr_db: Optional[float] = None
    target_fer: float = 1e-6
    codespec: Optional[str] = None
    kernel: Literal["minsum", "exact"] = "minsum"


class SclParams(PolarParams):
    crc: Optional[str] = "crc11"
    list_size: int = Field(default=8, ge=1)


class AedParams(PolarParams):
    i_min: list[int]
    ensemble_size: int = Field(default=8, ge=1)
    seed: SeedSpec = Field(default_factory=SeedSpec)


def _crc(name: Optional[str]):
    if name is None:
        return None
    try:
        return CRC_PRESETS[name.lower()]
    except KeyError:
        raise ConfigError(f"unknown CRC preset {name!r}; choose from {sorted(CRC_PRESETS)}") from None


def _polar_spec(p: PolarParams) -> PolarCodeSpec:
    if p.codespec is not None:
        return read_codespec(p.codespec)
    crc = _crc(p.crc)
    label = f"polar-{p.N}-{p.K}" + (f"-{crc.name}" if crc else "")
    return construct_polar_code(p.N, p.K, design_snr_db=p.design_snr_db, crc=crc,
                                target_fer=p.target_fer, name=label)


def _polar_codec(spec: PolarCodeSpec, decoder: Decoder, symmetric: bool) -> Codec:
    def encode(message: BitVector) -> BitVector:
        return length_match_transmit(spec, polar_encode(spec, message))

    return Codec(label=f"Polar {decoder.name}", payload_bits=spec.payload_bits,
                 code_length=spec.transmitted_length, rate=spec.rate, decoder=decoder,
                 encode=encode, symmetric=symmetric)


class PolarScScheme(Scheme):
    params_model = PolarParams

    def __init__(self, simplified: bool = False):
        family = "polar-ssc" if simplified else "polar-sc"
        super().__init__(family, "Polar code with (simplified) successive-cancellation decoding", symmetric=True)
        self.simplified = simplified

    def build(self, params: PolarParams) -> Codec:
        spec = _polar_spec(params)
        decoder = ScDecoder(spec, kernel=params.kernel, simplified=self.simplified)
        # a CRC-carrying code is simulated with random payloads
        return _polar_codec(spec, decoder, self.symmetric and spec.crc is None)


class PolarSclScheme(Scheme):
    params_model = SclParams

    def __init__(self):
        super().__init__("polar-scl", "Polar code with (CRC-aided) SC list decoding")

    def build(self, params: SclParams) -> Codec:
        spec = _polar_spec(params)
        return _polar_codec(spec, SclDecoder(spec, params.list_size, kernel=params.kernel), self.symmetric)


class PolarAedScheme(Scheme):
    params_model = AedParams

    def __init__(self):
        super().__init__("polar-aed", "Polar code with automorphism ensemble SC decoding")

    def build(self, params: AedParams) -> Codec:
        if params.codespec is not None:
            spec = read_codespec(params.codespec)
        else:
            spec = construct_aed_code(params.N, params.K, params.i_min, params.design_snr_db,
                                      crc=_crc(params.crc), name=f"polar-aed-{params.N}-{params.K}",
                                      target_fer=params.target_fer)
        decoder = AedDecoder(spec, params.ensemble_size, params.seed, kernel=params.kernel)
        return _polar_codec(spec, decoder, self.symmetric)


# ---------------------------------------------------------------------------
# LDPC families


class LdpcParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    code: Literal["nr-bg2", "dvbs2", "alist"] = "nr-bg2"
    K: int = 128
    N: int = 256
    rate: Literal["1/2", "8/9"] = "1/2"
    # set to build a seeded stand-in instead of the standard table
    code_seed: Optional[SeedSpec] = None
    base_graph: Optional[str] = None
    address_table: Optional[str] = None
    alist: Optional[str] = None
    # Z of a quasi-cyclic alist matrix; layers become Z-row blocks
    lifting_size: Optional[int] = Field(default=None, ge=1)
    bp: BpConfig = BpConfig()


class LdpcBchParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    rate: Literal["1/2", "8/9"] = "1/2"
    code_seed: Optional[SeedSpec] = None
    address_table: Optional[str] = None
    bp: BpConfig = BpConfig()


def _ldpc_code(params: LdpcParams) -> LdpcCode:
    if params.code == "nr-bg2":
        base = load_base_graph(params.base_graph) if params.base_graph else None
        return nr_like_bg2(params.K, params.N, seed=params.code_seed, base_graph=base)
    if params.code == "dvbs2":
        table = load_dvbs2_table(params.address_table) if params.address_table else None
        return dvbs2_like(params.rate, seed=params.code_seed, table=table)
    if params.alist is None:
        raise ConfigError("code 'alist' needs an 'alist' path")
    return code_from_matrix(load_alist(params.alist, params.lifting_size), name=Path(params.alist).stem)


class LdpcBpScheme(Scheme):
    params_model = LdpcParams

    def __init__(self):
        super().__init__("ldpc-bp", "LDPC code with belief-propagation decoding", symmetric=True)

    def build(self, params: LdpcParams) -> Codec:
        code = _ldpc_code(params)
        decoder = BpDecoder(code, params.bp)
        family = {"nr-bg2": "LDPC 5G", "dvbs2": "LDPC DVB-S2"}.get(params.code, code.name)
        return Codec(label=f"{family} {decoder.name}", payload_bits=code.K, code_length=code.N,
                     rate=code.rate, decoder=decoder, encode=code.encode, symmetric=self.symmetric)


class ConcatenatedDecoder(Decoder):
    """Inner LDPC BP followed by outer BCH decoding of the LDPC message."""

    def __init__(self, inner: BpDecoder, outer: BchSpec):
        super().__init__(name=inner.name)
        self.inner = inner
        self.outer = outer

    def decode(self, llr: LlrVector) -> DecodeOutcome:
        outcome = self.inner.decode(llr)
        result = bch_decode(outcome.message, self.outer)
        outcome.message = result.message
        outcome.extra["bch_success"] = result.success
        outcome.extra["bch_errors"] = result.error_count
        return outcome

    def describe(self):
        return {**self.inner.describe(), "outer": f"BCH({self.outer.n},{self.outer.k},t={self.outer.t})"}


class LdpcBchScheme(Scheme):
    params_model = LdpcBchParams

    def __init__(self):
        super().__init__("ldpc-bch-bp", "DVB-S2 LDPC inner code with outer BCH code", symmetric=True)

    def build(self, params: LdpcBchParams) -> Codec:
        table = load_dvbs2_table(params.address_table) if params.address_table else None
        code = dvbs2_like(params.rate, seed=params.code_seed, table=table)
        bch = dvbs2_bch(params.rate)
        if bch.n != code.K:
            raise ConfigError(f"BCH length {bch.n} does not match LDPC dimension {code.K}")

        def encode(message: BitVector) -> BitVector:
            return code.encode(bch_encode(message, bch))

        decoder = ConcatenatedDecoder(BpDecoder(code, params.bp), bch)
        return Codec(label=f"LDPC+BCH DVB-S2 {decoder.name}", payload_bits=bch.k, code_length=code.N,
                     rate=bch.k / code.N, decoder=decoder, encode=encode, symmetric=self.symmetric)


class ScLdpcParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    chain: ChainSpec = ChainSpec()
    chain_file: Optional[str] = None
    window: WindowConfig = WindowConfig()


class ScLdpcScheme(Scheme):
    """Chains are decoded from the all-zero codeword; errors are counted over all code bits."""

    params_model = ScLdpcParams

    def __init__(self):
        super().__init__("sc-ldpc-wbp", "Spatially-coupled LDPC chain with sliding-window BP", symmetric=True)

    def build(self, params: ScLdpcParams) -> Codec:
        spec = read_chain_spec(params.chain_file) if params.chain_file else params.chain
        chain = chain_from_spec(spec)
        decoder = WindowedBpDecoder(chain, params.window)
        return Codec(label=f"SC-LDPC {decoder.name}", payload_bits=chain.N, code_length=chain.N,
                     rate=chain.design_rate, decoder=decoder, encode=None, symmetric=self.symmetric)


def builtin_schemes() -> list[Scheme]:
    return [
        PolarScScheme(),
        PolarScScheme(simplified=True),
        PolarSclScheme(),
        PolarAedScheme(),
        LdpcBpScheme(),
        LdpcBchScheme(),
        ScLdpcScheme(),
    ]


def zero_payload(codec: Codec) -> tuple[BitVector, BitVector]:
    return np.zeros(codec.payload_bits, dtype=np.uint8), np.zeros(codec.code_length, dtype=np.uint8)
