"""Belief-propagation decoding on the Tanner graph.

Messages live on edges in the row-major (CSR) order of H. Check-node updates work on
contiguous edge segments, one per check, so every kernel is a handful of ``reduceat`` calls.
"""

import logging
import weakref
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict

from ..core.decoder import DecodeOutcome, Decoder
from ..core.exceptions import DomainError
from ..core.types import BitVector, LlrVector, as_bits, as_llrs
from .codes import LdpcCode
from .matrix import ParityCheckMatrix, TannerGraph, syndrome

logger = logging.getLogger(__name__)

_PHI_MIN = 1e-12
_PHI_MAX = 50.0


class BpVariant(str, Enum):
    SPA = "Spa"
    NMS = "NormalizedMinSum"
    OMS = "OffsetMinSum"


class BpSchedule(str, Enum):
    FLOODING = "Flooding"
    LAYERED = "Layered"


class Quantization(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    bits: int
    step: float


class BpConfig(BaseModel):
    """Belief-propagation settings.

    ``alpha`` scales min-sum outputs (NormalizedMinSum), ``beta`` is subtracted from them
    (OffsetMinSum). One layered iteration is one sweep over all layers.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    variant: BpVariant = BpVariant.SPA
    alpha: float = 0.75
    beta: float = 0.5
    schedule: BpSchedule = BpSchedule.LAYERED
    max_iterations: int = 8
    quantization: Optional[Quantization] = None
    early_stop: bool = True
    clip: float = 30.0

    def check(self) -> "BpConfig":
        """Raise DomainError on a violated invariant; returns self for chaining."""
        if not 0.0 < self.alpha <= 1.0:
            raise DomainError(f"normalization alpha must lie in (0, 1], got {self.alpha}")
        if self.beta < 0.0:
            raise DomainError(f"offset beta must be >= 0, got {self.beta}")
        if self.max_iterations < 0:
            raise DomainError(f"max_iterations must be >= 0, got {self.max_iterations}")
        if self.clip <= 0.0:
            raise DomainError(f"message clip must be positive, got {self.clip}")
        if self.quantization is not None:
            _check_quantizer(self.quantization.bits, self.quantization.step)
        return self

    @property
    def label(self) -> str:
        prefix = "LBP" if self.schedule is BpSchedule.LAYERED else "BP"
        return f"{prefix}-{self.max_iterations}"


def _check_quantizer(bits: int, step: float) -> None:
    if not 2 <= bits <= 16:
        raise DomainError(f"quantizer bits must lie in [2, 16], got {bits}")
    if step <= 0.0:
        raise DomainError(f"quantizer step must be positive, got {step}")


def quantize_llr(llr: ArrayLike, bits: int, step: float) -> LlrVector:
    """Uniform symmetric quantizer: round |x| / step to the nearest integer (halves away
    from zero), saturate at 2^(bits-1) - 1 levels and restore the sign. Zero maps to zero.
    """
    _check_quantizer(bits, step)
    x = np.asarray(llr, dtype=np.float64)
    top = (1 << (bits - 1)) - 1
    levels = np.minimum(np.floor(np.abs(x) / step + 0.5), top)
    return np.sign(x) * levels * step


def count_bit_errors(decoded: ArrayLike, reference: ArrayLike) -> tuple[bool, int]:
    a, b = as_bits(decoded), as_bits(reference)
    if a.size != b.size:
        raise DomainError(f"length mismatch: {a.size} vs {b.size}")
    errors = int(np.count_nonzero(a != b))
    return errors > 0, errors


def _phi(x: np.ndarray) -> np.ndarray:
    """-log tanh(x / 2); its own inverse on x > 0."""
    x = np.clip(x, _PHI_MIN, _PHI_MAX)
    return np.log1p(2.0 / np.expm1(x))


def check_update(v2c: np.ndarray, starts: np.ndarray, cfg: BpConfig) -> np.ndarray:
    """Extrinsic check-to-variable messages for checks stored as contiguous segments.

    Args:
        v2c: Incoming variable-to-check messages.
        starts: Start offset of every (non-empty) check segment in ``v2c``.
        cfg: Kernel selection and clipping.
    """
    counts = np.diff(np.append(starts, v2c.size))
    mag = np.abs(v2c)
    neg = v2c < 0
    parity = np.add.reduceat(neg.astype(np.int64), starts) % 2
    flip = np.repeat(parity.astype(bool), counts) ^ neg
    if cfg.variant is BpVariant.SPA:
        phi = _phi(mag)
        total = np.repeat(np.add.reduceat(phi, starts), counts)
        out = _phi(np.maximum(total - phi, 0.0))
    else:
        min1 = np.minimum.reduceat(mag, starts)
        idx = np.arange(mag.size)
        at_min = np.where(mag == np.repeat(min1, counts), idx, mag.size)
        first = np.minimum.reduceat(at_min, starts)
        masked = mag.copy()
        masked[first] = np.inf
        min2 = np.minimum.reduceat(masked, starts)
        out = np.repeat(min1, counts)
        out[first] = min2
        if cfg.variant is BpVariant.NMS:
            out = cfg.alpha * out
        else:
            out = np.maximum(out - cfg.beta, 0.0)
    out = np.minimum(out, cfg.clip)
    return np.where(flip, -out, out)


@dataclass
class BpState:
    """Edge messages and posteriors of one decoding run."""

    c2v: np.ndarray
    v2c: np.ndarray
    posterior: np.ndarray
    iteration: int = 0

    def hard_decision(self) -> BitVector:
        return (self.posterior < 0).astype(np.uint8)


@dataclass(frozen=True)
class _Layer:
    edges: np.ndarray
    cols: np.ndarray
    starts: np.ndarray


class _BpPlan:
    """Per-matrix index arrays, built once and shared by every decode of that matrix."""

    def __init__(self, H: ParityCheckMatrix):
        self.graph: TannerGraph = H.tanner_graph()
        row_starts = self.graph.row_starts
        self.starts = row_starts[:-1][self.graph.cn_degrees > 0]
        self.layers = [self._layer(np.asarray(rows), row_starts) for rows in H.layers]

    def _layer(self, rows: np.ndarray, row_starts: np.ndarray) -> _Layer:
        deg = row_starts[rows + 1] - row_starts[rows]
        keep = deg > 0
        rows, deg = rows[keep], deg[keep]
        local = np.concatenate([[0], np.cumsum(deg)[:-1]]).astype(np.int64)
        edges = np.repeat(row_starts[rows] - local, deg) + np.arange(int(deg.sum()))
        return _Layer(edges=edges, cols=self.graph.edge_cols[edges], starts=local)


_PLANS: "weakref.WeakKeyDictionary[ParityCheckMatrix, _BpPlan]" = weakref.WeakKeyDictionary()


def bp_plan(H: ParityCheckMatrix) -> _BpPlan:
    plan = _PLANS.get(H)
    if plan is None:
        plan = _PLANS[H] = _BpPlan(H)
    return plan


def run_bp(H: ParityCheckMatrix, llr: ArrayLike, cfg: BpConfig) -> BpState:
    """Run BP and return the final edge state.

    Flooding updates all checks, then all variables. Layered updates one layer at a time
    in the declared order and refreshes the posterior right after each layer.
    """
    cfg.check()
    channel = as_llrs(llr)
    if channel.size != H.N:
        raise DomainError(f"LLR length {channel.size} != N={H.N}")
    if cfg.quantization is not None:
        q = cfg.quantization
        quant = lambda x: quantize_llr(x, q.bits, q.step)  # noqa: E731
    else:
        quant = lambda x: x  # noqa: E731
    channel = quant(channel)
    plan = bp_plan(H)
    cols = plan.graph.edge_cols
    state = BpState(c2v=np.zeros(cols.size), v2c=np.clip(channel[cols], -cfg.clip, cfg.clip),
                    posterior=channel.copy())

    if cfg.early_stop and not syndrome(H, state.hard_decision()).any():
        return state

    for it in range(1, cfg.max_iterations + 1):
        if cfg.schedule is BpSchedule.FLOODING:
            state.c2v = quant(check_update(quant(state.v2c), plan.starts, cfg))
            state.posterior = channel + np.bincount(cols, weights=state.c2v, minlength=H.N)
            state.v2c = np.clip(state.posterior[cols] - state.c2v, -cfg.clip, cfg.clip)
        else:
            for layer in plan.layers:
                old = state.c2v[layer.edges]
                v2c = quant(np.clip(state.posterior[layer.cols] - old, -cfg.clip, cfg.clip))
                new = quant(check_update(v2c, layer.starts, cfg))
                np.add.at(state.posterior, layer.cols, new - old)
                state.c2v[layer.edges] = new
                state.v2c[layer.edges] = v2c
        state.iteration = it
        if cfg.early_stop and not syndrome(H, state.hard_decision()).any():
            break
    return state


def decode_bp(H: ParityCheckMatrix, llr: ArrayLike, cfg: Optional[BpConfig] = None) -> DecodeOutcome:
    """Decode one frame; ``message`` and ``codeword`` are both the hard decision on H's columns."""
    cfg = cfg or BpConfig()
    state = run_bp(H, llr, cfg)
    hard = state.hard_decision()
    weight = int(syndrome(H, hard).sum())
    return DecodeOutcome(
        message=hard,
        codeword=hard,
        metric=float(np.abs(np.clip(state.posterior, -cfg.clip, cfg.clip)).sum()),
        iterations=state.iteration,
        converged=weight == 0,
        operations=state.iteration * H.nnz,
        extra={"syndrome_weight": weight},
    )


class BpDecoder(Decoder):
    """BP decoder bound to a code (rate matching and message extraction included) or to a
    bare parity-check matrix."""

    def __init__(self, code: Union[LdpcCode, ParityCheckMatrix], cfg: Optional[BpConfig] = None,
                 name: Optional[str] = None):
        self.cfg = (cfg or BpConfig()).check()
        super().__init__(name=name or self.cfg.label)
        self.code = code if isinstance(code, LdpcCode) else None
        self.H = code.H if isinstance(code, LdpcCode) else code
        bp_plan(self.H)

    def decode(self, llr: LlrVector) -> DecodeOutcome:
        mother = self.code.mother_llr(llr) if self.code is not None else llr
        outcome = decode_bp(self.H, mother, self.cfg)
        if self.code is not None:
            outcome.message = self.code.extract_message(outcome.codeword)
        return outcome

    def describe(self):
        return {
            "decoder": self.name,
            "variant": self.cfg.variant.value,
            "schedule": self.cfg.schedule.value,
            "max_iterations": self.cfg.max_iterations,
            "quantization": self.cfg.quantization.model_dump() if self.cfg.quantization else None,
            "code": self.code.name if self.code is not None else self.H.name,
        }
