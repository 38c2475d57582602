"""Spatially-coupled LDPC chains built by edge spreading, and the sliding-window decoder.

Chain layout: variable position t (0..L-1) carries ``b_v * Z`` bits; check position i
(0..L+w-2) carries ``b_c * Z`` checks; check position i sees variable position t through
component B_{i-t} when 0 <= i - t < w. Termination is full: the chain simply stops.
"""

import json
import logging
from pathlib import Path
from typing import Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..core.decoder import DecodeOutcome, Decoder
from ..core.exceptions import ConstructionError, DomainError, ParseError
from ..core.types import LlrVector, SeedSpec, as_llrs
from .decoder import BpConfig, BpSchedule, BpVariant, bp_plan, check_update
from .matrix import ParityCheckMatrix, creates_four_cycle, expand_base_graph, syndrome

logger = logging.getLogger(__name__)

FORMAT_NAME = "unicodec.sc-ldpc"
FORMAT_VERSION = 1

# (4, 8)-regular protograph: every one of 4 checks meets every one of 8 variables once
REGULAR_4_8: tuple[tuple[int, ...], ...] = tuple(tuple(1 for _ in range(8)) for _ in range(4))


class ChainSpec(BaseModel):
    """Everything needed to rebuild a chain bit-exactly."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    base: tuple[tuple[int, ...], ...] = REGULAR_4_8
    coupling_width: int = 3
    chain_length: int = 10
    lifting_size: int = 800
    seed: SeedSpec = Field(default_factory=SeedSpec)
    termination: Literal["full"] = "full"


class CoupledChain:
    """A built chain: its spec, spread components and the lifted band matrix."""

    def __init__(self, spec: ChainSpec, components: np.ndarray, H: ParityCheckMatrix):
        self.spec = spec
        self.components = components
        self.H = H

    @property
    def w(self) -> int:
        return self.spec.coupling_width

    @property
    def L(self) -> int:
        return self.spec.chain_length

    @property
    def Z(self) -> int:
        return self.spec.lifting_size

    @property
    def n_per_position(self) -> int:
        return self.components.shape[2] * self.Z

    @property
    def m_per_position(self) -> int:
        return self.components.shape[1] * self.Z

    @property
    def check_positions(self) -> int:
        return self.L + self.w - 1

    @property
    def N(self) -> int:
        return self.H.N

    @property
    def design_rate(self) -> float:
        """1 - M/N, termination loss included."""
        return 1.0 - self.H.M / self.H.N

    def position_columns(self, t: int) -> slice:
        return slice(t * self.n_per_position, (t + 1) * self.n_per_position)

    def check_rows(self, i: int) -> slice:
        return slice(i * self.m_per_position, (i + 1) * self.m_per_position)

    def __repr__(self) -> str:
        return f"CoupledChain(w={self.w}, L={self.L}, Z={self.Z}, N={self.N}, M={self.H.M})"


def spread_edges(base: Sequence[Sequence[int]], w: int) -> np.ndarray:
    """Split a protograph into w binary components B_0..B_{w-1} with sum equal to ``base``.

    An entry of multiplicity m sends its edges to m distinct components starting at
    (r + c) mod w, which keeps the split as even as the protograph allows.

    Raises:
        ConstructionError: an entry's multiplicity exceeds w.
    """
    B = np.asarray(base, dtype=np.int64)
    if B.ndim != 2 or B.size == 0 or np.any(B < 0):
        raise DomainError("protograph must be a non-empty matrix of non-negative integers")
    if B.max() > w:
        r, c = np.argwhere(B > w)[0]
        raise ConstructionError(f"protograph entry ({r}, {c}) has {B[r, c]} edges, more than w={w}")
    comps = np.zeros((w, *B.shape), dtype=np.int64)
    for r, c in np.argwhere(B > 0):
        for j in range(B[r, c]):
            comps[(r + c + j) % w, r, c] = 1
    return comps


def build_coupled_chain(base: Optional[Sequence[Sequence[int]]] = None, w: int = 3, L: int = 10,
                        Z: int = 800, seed: Optional[SeedSpec] = None) -> CoupledChain:
    """Spread, couple, terminate and lift a protograph chain.

    Circulant shifts are drawn per chain cell from ``seed``, avoiding 4-cycles where a draw
    allows.
    """
    rows = base if base is not None else REGULAR_4_8
    spec = ChainSpec(base=tuple(tuple(int(v) for v in row) for row in rows),
                     coupling_width=w, chain_length=L, lifting_size=Z, seed=seed or SeedSpec())
    return chain_from_spec(spec)


def chain_from_spec(spec: ChainSpec) -> CoupledChain:
    w, L, Z = spec.coupling_width, spec.chain_length, spec.lifting_size
    if w < 1:
        raise DomainError(f"coupling width must be >= 1, got {w}")
    if L <= w:
        raise DomainError(f"chain length {L} must exceed the coupling width {w}")
    if Z < 1:
        raise DomainError(f"lifting size must be >= 1, got {Z}")
    comps = spread_edges(spec.base, w)
    bc, bv = comps.shape[1:]
    rng = spec.seed.generator(0x5C1D)
    table = np.full(((L + w - 1) * bc, L * bv), -1, dtype=np.int64)
    for t in range(L):
        for k in range(w):
            for r, c in np.argwhere(comps[k] > 0):
                i, j = (t + k) * bc + r, t * bv + c
                for _ in range(32):
                    s = int(rng.integers(0, Z))
                    if not creates_four_cycle(table, i, j, s, Z):
                        break
                table[i, j] = s
    H = expand_base_graph(table, Z, name=f"sc-ldpc-w{w}-L{L}-Z{Z}")
    chain = CoupledChain(spec, comps, H)
    logger.debug("built %r, design rate %.4f", chain, chain.design_rate)
    return chain


def write_chain_spec(chain: Union[CoupledChain, ChainSpec], path: Union[str, Path]) -> Path:
    spec = chain.spec if isinstance(chain, CoupledChain) else chain
    path = Path(path)
    doc = {"format": FORMAT_NAME, "version": FORMAT_VERSION, **spec.model_dump(mode="json")}
    path.write_text(json.dumps(doc, indent=2) + "\n")
    return path


def read_chain_spec(path: Union[str, Path]) -> ChainSpec:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ParseError(f"cannot read chain spec: {exc.strerror or exc}", path=str(path)) from exc
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, path=str(path)) from exc
    if not isinstance(doc, dict) or doc.pop("format", None) != FORMAT_NAME:
        raise ParseError(f"not a {FORMAT_NAME} document", path=str(path))
    if doc.pop("version", None) != FORMAT_VERSION:
        raise ParseError(f"unsupported {FORMAT_NAME} version", path=str(path))
    try:
        return ChainSpec.model_validate(doc)
    except ValidationError as exc:
        raise ParseError(str(exc), path=str(path)) from exc


class WindowConfig(BaseModel):
    """Sliding-window schedule: D positions per window, a few flooding iterations per step,
    then the oldest position is committed."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    window_size: int = 8
    iterations_per_step: int = 1
    readout: Literal["oldest"] = "oldest"
    bp: BpConfig = BpConfig(variant=BpVariant.SPA, schedule=BpSchedule.FLOODING, early_stop=False)

    def check(self, chain_length: int) -> "WindowConfig":
        if self.iterations_per_step < 1:
            raise DomainError(f"iterations_per_step must be >= 1, got {self.iterations_per_step}")
        if not 1 <= self.window_size <= chain_length:
            raise DomainError(f"window size {self.window_size} outside [1, {chain_length}]")
        self.bp.check()
        return self


def decode_windowed(chain: CoupledChain, llr: LlrVector, wcfg: Optional[WindowConfig] = None) -> DecodeOutcome:
    """Sliding-window BP over the chain.

    Step t runs on check positions t..t+D-1 (all remaining checks once the window reaches
    the chain end). Variables of positions >= t are updated; edges of committed positions
    keep their last variable-to-check message. Position t is committed after the step.
    """
    wcfg = (wcfg or WindowConfig()).check(chain.L)
    H = chain.H
    channel = as_llrs(llr)
    if channel.size != H.N:
        raise DomainError(f"LLR length {channel.size} != chain length {H.N}")
    cfg = wcfg.bp
    plan = bp_plan(H)
    cols = plan.graph.edge_cols
    row_starts = plan.graph.row_starts
    c2v = np.zeros(cols.size)
    v2c = np.clip(channel[cols], -cfg.clip, cfg.clip)
    posterior = channel.copy()
    decided = np.zeros(H.N, dtype=np.uint8)
    D, L = wcfg.window_size, chain.L
    n_pos, m_pos = chain.n_per_position, chain.m_per_position
    steps = 0

    for t in range(L):
        last = chain.check_positions - 1 if t + D - 1 >= L - 1 else t + D - 1
        e_lo, e_hi = row_starts[t * m_pos], row_starts[(last + 1) * m_pos]
        if e_hi > e_lo:
            rows = np.arange(t * m_pos, (last + 1) * m_pos)
            starts = row_starts[rows][np.diff(row_starts)[rows] > 0] - e_lo
            wcols = cols[e_lo:e_hi]
            active = wcols >= t * n_pos
            window = slice(e_lo, e_hi)
            v2c[window] = np.where(active, np.clip(posterior[wcols] - c2v[window], -cfg.clip, cfg.clip), v2c[window])
            for _ in range(wcfg.iterations_per_step):
                c2v[window] = check_update(v2c[window], starts, cfg)
                posterior = channel + np.bincount(cols, weights=c2v, minlength=H.N)
                v2c[window] = np.where(active, np.clip(posterior[wcols] - c2v[window], -cfg.clip, cfg.clip),
                                       v2c[window])
                steps += 1
        sl = chain.position_columns(t)
        decided[sl] = posterior[sl] < 0

    weight = int(syndrome(H, decided).sum())
    return DecodeOutcome(
        message=decided,
        codeword=decided,
        metric=float(np.abs(np.clip(posterior, -cfg.clip, cfg.clip)).sum()),
        iterations=steps,
        converged=weight == 0,
        operations=steps * H.nnz,
        extra={"window_size": D, "syndrome_weight": weight},
    )


class WindowedBpDecoder(Decoder):
    def __init__(self, chain: CoupledChain, wcfg: Optional[WindowConfig] = None):
        self.wcfg = (wcfg or WindowConfig()).check(chain.L)
        super().__init__(name=f"WBP-{self.wcfg.window_size}")
        self.chain = chain
        bp_plan(chain.H)

    def decode(self, llr: LlrVector) -> DecodeOutcome:
        return decode_windowed(self.chain, llr, self.wcfg)

    def describe(self):
        return {"decoder": self.name, "window_size": self.wcfg.window_size,
                "iterations_per_step": self.wcfg.iterations_per_step,
                "coupling_width": self.chain.w, "chain_length": self.chain.L,
                "lifting_size": self.chain.Z}
