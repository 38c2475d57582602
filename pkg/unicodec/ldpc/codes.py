"""Concrete LDPC codes: 5G NR base graph 2 and DVB-S2 normal-frame IRA codes.

The standard tables ship as package data: ``data/nr_bg2.json`` holds the BG2 shift
coefficients of every lifting set and ``data/dvbs2_normal_*.txt`` the DVB-S2 parity
address tables. ``nr_like_bg2`` and ``dvbs2_like`` use them unless a table is passed in.
Passing a ``seed`` instead builds a seeded stand-in with the same structure (BG2
connectivity and double-diagonal core, or the DVB-S2 degree profile and q-shift rule),
for experiments on code ensembles rather than on the standard codes.
"""

import json
import logging
import math
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp
from numpy.typing import ArrayLike

from ..core.exceptions import ConstructionError, DomainError, ParseError
from ..core.types import LLR_SATURATION, BitVector, LlrVector, SeedSpec, as_bits, as_llrs
from .encoder import AccumulatorEncoder, DoubleDiagonalEncoder, LdpcEncoder, select_encoder
from .matrix import BaseGraph, ParityCheckMatrix, creates_four_cycle, expand_base_graph

logger = logging.getLogger(__name__)

# lifting sizes grouped by set index (3GPP TS 38.212 Table 5.3.2-1)
LIFTING_SETS: tuple[tuple[int, ...], ...] = (
    (2, 4, 8, 16, 32, 64, 128, 256),
    (3, 6, 12, 24, 48, 96, 192, 384),
    (5, 10, 20, 40, 80, 160, 320),
    (7, 14, 28, 56, 112, 224),
    (9, 18, 36, 72, 144, 288),
    (11, 22, 44, 88, 176, 352),
    (13, 26, 52, 104, 208),
    (15, 30, 60, 120, 240),
)

BG2_ROWS, BG2_COLS, BG2_INFO_COLS, BG2_CORE = 42, 52, 10, 4

# seeded stand-in core: P_1 at rows 0 and 3 of column 10, identity elsewhere
_BG2_CORE_SHIFTS = {(0, 10): 1, (2, 10): 0, (3, 10): 1}

_MAX_SHIFT_DRAWS = 64


class RateMatcher:
    """Maps between the mother codeword of H and the transmitted bits.

    Args:
        mother_length: Number of columns of H.
        order: Mother positions in transmission order; repeats are combined on receive.
        fillers: Mother positions known to be zero (never transmitted).
    """

    def __init__(self, mother_length: int, order: Optional[ArrayLike] = None, fillers: ArrayLike = ()):
        self.mother_length = mother_length
        self.order = np.arange(mother_length) if order is None else np.asarray(order, dtype=np.int64)
        self.fillers = np.asarray(fillers, dtype=np.int64)
        if self.order.size and (self.order.min() < 0 or self.order.max() >= mother_length):
            raise DomainError("transmission order points outside the mother codeword")
        if np.intersect1d(self.order, self.fillers).size:
            raise DomainError("filler bits cannot be transmitted")

    @property
    def transmitted_length(self) -> int:
        return int(self.order.size)

    @property
    def punctured(self) -> np.ndarray:
        """Mother positions neither sent nor known."""
        hidden = np.ones(self.mother_length, dtype=bool)
        hidden[self.order] = False
        hidden[self.fillers] = False
        return np.flatnonzero(hidden)

    def transmit(self, codeword: ArrayLike) -> BitVector:
        bits = as_bits(codeword)
        if bits.size != self.mother_length:
            raise DomainError(f"codeword length {bits.size} != {self.mother_length}")
        return bits[self.order]

    def recover(self, llr: ArrayLike) -> LlrVector:
        """Received LLRs -> mother LLRs: punctured 0, fillers saturated, repeats summed."""
        values = as_llrs(llr)
        if values.size != self.transmitted_length:
            raise DomainError(f"LLR length {values.size} != transmitted length {self.transmitted_length}")
        mother = np.zeros(self.mother_length)
        np.add.at(mother, self.order, values)
        mother[self.fillers] = LLR_SATURATION
        return np.clip(mother, -LLR_SATURATION, LLR_SATURATION)


class LdpcCode:
    """An LDPC code as the harness sees it: payload in, transmitted bits out.

    Message bits fill the first K encoder inputs; any remaining encoder inputs are filler
    zeros.
    """

    def __init__(self, name: str, H: ParityCheckMatrix, encoder: LdpcEncoder,
                 rate_matcher: Optional[RateMatcher] = None, K: Optional[int] = None):
        self.name = name
        self.H = H
        self.encoder = encoder
        self.K = encoder.K if K is None else K
        if not 0 < self.K <= encoder.K:
            raise DomainError(f"K={self.K} outside (0, {encoder.K}]")
        self.rate_matcher = rate_matcher or RateMatcher(H.N, fillers=encoder.info_positions[self.K:])

    @property
    def N(self) -> int:
        return self.rate_matcher.transmitted_length

    @property
    def rate(self) -> float:
        return self.K / self.N

    @property
    def message_positions(self) -> np.ndarray:
        return self.encoder.info_positions[: self.K]

    def encode(self, message: ArrayLike) -> BitVector:
        """Payload -> transmitted bits."""
        bits = as_bits(message)
        if bits.size != self.K:
            raise DomainError(f"message length {bits.size} != K={self.K}")
        full = np.zeros(self.encoder.K, dtype=np.uint8)
        full[: self.K] = bits
        return self.rate_matcher.transmit(self.encoder.encode(full))

    def mother_llr(self, llr: ArrayLike) -> LlrVector:
        return self.rate_matcher.recover(llr)

    def extract_message(self, mother_codeword: ArrayLike) -> BitVector:
        return np.asarray(mother_codeword, dtype=np.uint8)[self.message_positions]

    def describe(self) -> dict:
        return {"code": self.name, "K": self.K, "N": self.N, "mother": [self.H.M, self.H.N]}

    def __repr__(self) -> str:
        return f"LdpcCode(name={self.name}, K={self.K}, N={self.N}, H={self.H!r})"


def select_lifting(K: int) -> tuple[int, int]:
    """Smallest BG2 lifting size Z with kb * Z >= K.

    Returns:
        (Z, kb) with kb the number of information columns actually carrying message bits.
    """
    if K < 1:
        raise DomainError(f"K must be positive, got {K}")
    if K > 640:
        kb = 10
    elif K > 560:
        kb = 9
    elif K > 192:
        kb = 8
    else:
        kb = 6
    candidates = [z for group in LIFTING_SETS for z in group if kb * z >= K]
    if not candidates:
        raise DomainError(f"K={K} exceeds the largest BG2 lifting")
    return min(candidates), kb


@lru_cache(maxsize=1)
def _bg2_data() -> dict:
    text = resources.files("unicodec").joinpath("data/nr_bg2.json").read_text()
    return json.loads(text)


def lifting_set_index(Z: int) -> int:
    for i, group in enumerate(LIFTING_SETS):
        if Z in group:
            return i
    raise DomainError(f"Z={Z} is not a 5G lifting size")


def standard_bg2(Z: int) -> BaseGraph:
    """BG2 of TS 38.212 lifted by Z: shift V mod Z from the set that contains Z."""
    table = np.array(_bg2_data()["sets"][str(lifting_set_index(Z))], dtype=np.int64)
    table = np.where(table >= 0, table % Z, -1)
    return BaseGraph(lifting_size=Z, shifts=tuple(map(tuple, table.tolist())))


def bg2_like_base_graph(Z: int, seed: SeedSpec) -> BaseGraph:
    """Seeded stand-in for BG2: the standard connectivity with drawn shifts.

    The core keeps a fixed double-diagonal pattern and the extension diagonal is the
    identity; other shifts avoid 4-cycles where a draw allows.
    """
    rng = seed.generator(0xB62)
    mask = np.array(_bg2_data()["H"], dtype=bool)
    table = np.full(mask.shape, -1, dtype=np.int64)
    for i, j in zip(*np.nonzero(mask)):
        if (i < BG2_CORE and j >= BG2_INFO_COLS) or j == BG2_INFO_COLS + i:
            table[i, j] = _BG2_CORE_SHIFTS.get((int(i), int(j)), 0) % Z
    for i, j in zip(*np.nonzero(mask)):
        if table[i, j] >= 0:
            continue
        for _ in range(_MAX_SHIFT_DRAWS):
            s = int(rng.integers(0, Z))
            if not creates_four_cycle(table, i, j, s, Z):
                break
        table[i, j] = s
    return BaseGraph(lifting_size=Z, shifts=tuple(map(tuple, table.tolist())))


def nr_like_bg2(K: int = 128, N: int = 256, seed: Optional[SeedSpec] = None,
                base_graph: Optional[BaseGraph] = None, name: Optional[str] = None) -> LdpcCode:
    """5G NR code on base graph 2 with K payload bits and N transmitted bits.

    The first 2Z systematic bits are punctured, filler bits pad the message to 10 Z, and the
    transmitted bits are read from a circular buffer starting at column 2 (fillers skipped).
    Only the leading rows/columns the buffer reaches are kept for decoding.

    Args:
        K: Payload bits.
        N: Transmitted bits.
        seed: Builds the seeded stand-in (:func:`bg2_like_base_graph`) instead of the
            standard table.
        base_graph: Full 42 x 52 table lifted by the Z that K selects; overrides both.
    """
    if N <= K:
        raise DomainError(f"N={N} must exceed K={K}")
    Z, _ = select_lifting(K)
    if base_graph is None:
        base_graph = standard_bg2(Z) if seed is None else bg2_like_base_graph(Z, seed)
    elif base_graph.lifting_size != Z:
        raise ConstructionError(f"base graph is lifted by {base_graph.lifting_size}, K={K} needs Z={Z}")
    if (base_graph.rows, base_graph.cols) != (BG2_ROWS, BG2_COLS):
        raise ConstructionError(f"expected a {BG2_ROWS}x{BG2_COLS} base graph")

    k_ldpc = BG2_INFO_COLS * Z
    n_fillers = k_ldpc - K
    needed = N + 2 * Z + n_fillers
    cols = min(BG2_COLS, max(BG2_INFO_COLS + BG2_CORE, math.ceil(needed / Z)))
    rows = cols - BG2_INFO_COLS
    full = expand_base_graph(base_graph.shifts, Z, name="bg2")
    H = full.submatrix(rows * Z, cols * Z, name=name or f"nr-bg2-{K}-{N}")

    fillers = np.arange(K, k_ldpc)
    buffer = np.setdiff1d(np.arange(2 * Z, cols * Z), fillers)
    order = np.resize(buffer, N)
    if N > buffer.size:
        logger.info("circular buffer of %d bits wraps for N=%d", buffer.size, N)
    encoder = DoubleDiagonalEncoder(H, BG2_CORE)
    code = LdpcCode(name or f"ldpc-5g-{N}-{K}", H, encoder, RateMatcher(H.N, order, fillers), K=K)
    logger.debug("built %r with Z=%d, %d fillers, %d punctured", code, Z, n_fillers, code.rate_matcher.punctured.size)
    return code


# ---------------------------------------------------------------------------
# DVB-S2 IRA codes


DVBS2_GROUP = 360
DVBS2_NORMAL_FRAME = 64800

# rate -> (K, [(columns, degree), ...]) for the normal frame
DVBS2_PROFILES: dict[str, tuple[int, tuple[tuple[int, int], ...]]] = {
    "1/2": (32400, ((12960, 8), (19440, 3))),
    "8/9": (57600, ((7200, 4), (50400, 3))),
}


def _draw_group(residues: Sequence[int], q: int, M: int, diffs: set[int],
                rng: np.random.Generator) -> list[int]:
    chosen: list[int] = []
    for res in residues:
        for _ in range(_MAX_SHIFT_DRAWS * 4):
            x = int(res + q * rng.integers(0, DVBS2_GROUP))
            new = {(x - y) % M for y in chosen} | {(y - x) % M for y in chosen}
            if x not in chosen and not (new & diffs):
                break
        else:
            while x in chosen:
                x = int(res + q * rng.integers(0, DVBS2_GROUP))
        diffs |= {(x - y) % M for y in chosen} | {(y - x) % M for y in chosen}
        chosen.append(x)
    return chosen


def dvbs2_address_table(rate: str, seed: SeedSpec) -> list[list[int]]:
    """Seeded stand-in for the standard table: one address list per group of 360
    information columns.

    Every residue class mod q receives the same number of addresses, so all checks see the
    same information degree; repeated address differences (4-cycles) are avoided when the
    draw allows.
    """
    if rate not in DVBS2_PROFILES:
        raise DomainError(f"no DVB-S2 profile for rate {rate!r}; choose from {sorted(DVBS2_PROFILES)}")
    K, profile = DVBS2_PROFILES[rate]
    M = DVBS2_NORMAL_FRAME - K
    q = M // DVBS2_GROUP
    degrees = [d for cols, d in profile for _ in range(cols // DVBS2_GROUP)]
    total = sum(degrees)
    if total % q:
        raise ConstructionError(f"{total} addresses cannot be spread evenly over q={q} classes")
    rng = seed.generator(0xD5B2)
    residues = np.tile(np.arange(q), total // q)
    rng.shuffle(residues)
    diffs: set[int] = set()
    table, start = [], 0
    for d in degrees:
        table.append(_draw_group(residues[start:start + d].tolist(), q, M, diffs, rng))
        start += d
    return table


def ira_from_address_table(table: Sequence[Sequence[int]], N: int, K: int,
                           name: str = "ira") -> ParityCheckMatrix:
    """IRA parity-check matrix: column 360 g + m of group g connects to rows (x + m q) mod M
    for each address x of the group; parity columns form the accumulator staircase.

    Layers are the q residue classes of the rows.
    """
    M = N - K
    if M % DVBS2_GROUP or K % DVBS2_GROUP:
        raise DomainError(f"N-K={M} and K={K} must be multiples of {DVBS2_GROUP}")
    q = M // DVBS2_GROUP
    if len(table) != K // DVBS2_GROUP:
        raise DomainError(f"expected {K // DVBS2_GROUP} address groups, got {len(table)}")
    m = np.arange(DVBS2_GROUP)
    rows, cols = [], []
    for g, addresses in enumerate(table):
        for x in addresses:
            if not 0 <= x < M:
                raise DomainError(f"address {x} outside [0, {M})")
            rows.append((x + m * q) % M)
            cols.append(g * DVBS2_GROUP + m)
    i = np.arange(M)
    rows += [i, i[1:]]
    cols += [K + i, K + i[:-1]]
    r, c = np.concatenate(rows), np.concatenate(cols)
    H = sp.csr_matrix((np.ones(r.size, dtype=np.int64), (r, c)), shape=(M, N))
    layers = [list(range(res, M, q)) for res in range(q)]
    return ParityCheckMatrix(H, layers=layers, name=name)


def load_dvbs2_table(path: Union[str, Path]) -> list[list[int]]:
    """Address table in the standard's annex layout: one line of addresses per group.

    Blank lines and lines starting with ``#`` are skipped.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read address table: {exc.strerror or exc}", path=str(path)) from exc
    table = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        try:
            table.append([int(x) for x in raw.split()])
        except ValueError:
            raise ParseError(f"non-integer address in {raw.strip()!r}", line=lineno, path=str(path)) from None
    if not table:
        raise ParseError("empty address table", line=1, path=str(path))
    return table


def standard_dvbs2_table(rate: str) -> list[list[int]]:
    """Normal-frame address table of EN 302 307-1 shipped with the package."""
    if rate not in DVBS2_PROFILES:
        raise DomainError(f"no DVB-S2 profile for rate {rate!r}; choose from {sorted(DVBS2_PROFILES)}")
    resource = resources.files("unicodec").joinpath(f"data/dvbs2_normal_{rate.replace('/', '_')}.txt")
    with resources.as_file(resource) as path:
        return load_dvbs2_table(path)


def dvbs2_like(rate: str = "1/2", seed: Optional[SeedSpec] = None,
               table: Optional[Sequence[Sequence[int]]] = None) -> LdpcCode:
    """Normal-frame (64800-bit) DVB-S2 LDPC code at rate 1/2 or 8/9.

    Args:
        rate: "1/2" or "8/9".
        seed: Builds the seeded stand-in (:func:`dvbs2_address_table`) instead of the
            standard table.
        table: Address table to use; overrides both.
    """
    if rate not in DVBS2_PROFILES:
        raise DomainError(f"no DVB-S2 profile for rate {rate!r}; choose from {sorted(DVBS2_PROFILES)}")
    K, _ = DVBS2_PROFILES[rate]
    if table is None:
        table = standard_dvbs2_table(rate) if seed is None else dvbs2_address_table(rate, seed)
    label = rate.replace("/", "")
    H = ira_from_address_table(table, DVBS2_NORMAL_FRAME, K, name=f"dvbs2-{label}")
    return LdpcCode(f"ldpc-dvbs2-{label}", H, AccumulatorEncoder(H))


def code_from_matrix(H: ParityCheckMatrix, name: Optional[str] = None) -> LdpcCode:
    """Wrap an arbitrary matrix (e.g. from an alist file) with the encoder it admits."""
    return LdpcCode(name or H.name, H, select_encoder(H))
