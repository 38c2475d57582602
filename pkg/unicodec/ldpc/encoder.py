"""Systematic LDPC encoders.

Each encoder fixes where the message sits in the codeword (``info_positions``):

- DoubleDiagonalEncoder: 5G-style QC matrix [A B 0; C1 C2 I]; message first, then the core
  parity block (solved through B^-1), then the identity-extension parity.
- AccumulatorEncoder: IRA matrix [H_i | staircase]; message first, then accumulated parity.
- GaussianEliminationEncoder: any H; message on the free columns of the RREF of H.
"""

import logging
from abc import ABC, abstractmethod
from typing import Optional

import numpy as np
import scipy.sparse as sp
from numpy.typing import ArrayLike

from ..core.exceptions import ConstructionError, DomainError
from ..core.types import BitVector, as_bits
from .matrix import ParityCheckMatrix, gf2_row_reduce

logger = logging.getLogger(__name__)


class LdpcEncoder(ABC):
    """Base class for encoders of a fixed parity-check matrix"""

    def __init__(self, name: str, H: ParityCheckMatrix, K: int, info_positions: np.ndarray):
        self.name = name
        self.H = H
        self.K = K
        self.info_positions = np.asarray(info_positions, dtype=np.int64)

    @property
    def N(self) -> int:
        return self.H.N

    @abstractmethod
    def _encode(self, message: BitVector) -> BitVector:
        pass

    def encode(self, message: ArrayLike) -> BitVector:
        bits = as_bits(message)
        if bits.size != self.K:
            raise DomainError(f"message length {bits.size} != K={self.K}")
        return self._encode(bits)

    def extract_message(self, codeword: ArrayLike) -> BitVector:
        return np.asarray(codeword, dtype=np.uint8)[self.info_positions]

    def __repr__(self) -> str:
        return f"{type(self).__name__}(H={self.H.name}, K={self.K}, N={self.N})"


def _mod2(x) -> np.ndarray:
    return (np.asarray(x) % 2).astype(np.uint8)


def _gf2_inverse(A: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    R, pivots = gf2_row_reduce(np.hstack([A % 2, np.eye(n, dtype=np.uint8)]))
    if pivots.size < n or pivots[n - 1] >= n:
        raise ConstructionError("core parity block is singular")
    return R[:n, n:]


class DoubleDiagonalEncoder(LdpcEncoder):
    """Encoder for QC matrices whose parity part is a ``core_rows`` x ``core_rows`` invertible
    core followed by an identity extension.

    Base-graph layout (kb = base_cols - base_rows information columns)::

        [ A  | B  | 0 ]    rows 0..g-1
        [ C1 | C2 | I ]    rows g..mb-1
    """

    def __init__(self, H: ParityCheckMatrix, core_rows: int = 4):
        if H.base_graph is None:
            raise ConstructionError("double-diagonal encoding needs a quasi-cyclic matrix")
        base = H.base_graph.table()
        Z = H.base_graph.lifting_size
        mb, nb = base.shape
        kb = nb - mb
        g = core_rows
        if kb < 1 or mb < g:
            raise ConstructionError(f"base graph {mb}x{nb} has no room for a {g}-row core")
        ext = base[g:, kb + g:]
        if ext.size and not np.array_equal(ext, np.where(np.eye(mb - g, dtype=bool), 0, -1)):
            raise ConstructionError("extension parity block is not an identity")
        if np.any(base[:g, kb + g:] >= 0):
            raise ConstructionError("core rows touch extension parity columns")

        csr = H.csr.astype(np.int64)
        k, pc = kb * Z, g * Z
        self.Z = Z
        self._A = csr[:pc, :k]
        self._B_inv = sp.csr_matrix(_gf2_inverse(csr[:pc, k:k + pc].toarray().astype(np.uint8)).astype(np.int64))
        self._C = csr[pc:, :k + pc]
        super().__init__("double-diagonal", H, k, np.arange(k))

    def _encode(self, message: BitVector) -> BitVector:
        m = message.astype(np.int64)
        core = _mod2(self._B_inv @ _mod2(self._A @ m).astype(np.int64))
        head = np.concatenate([message, core])
        ext = _mod2(self._C @ head.astype(np.int64))
        return np.concatenate([head, ext]).astype(np.uint8)


class AccumulatorEncoder(LdpcEncoder):
    """IRA encoder: parity p solves H_i m + S p = 0 with S the dual-diagonal staircase.

    Row i of S holds p_i and p_{i-1}, so p = cumulative XOR of H_i m.
    """

    def __init__(self, H: ParityCheckMatrix):
        M, N = H.shape
        K = N - M
        if K < 1:
            raise ConstructionError(f"{M}x{N} matrix has no information columns")
        staircase = sp.eye(M, dtype=np.int64, format="csr") + sp.eye(M, k=-1, dtype=np.int64, format="csr")
        parity = H.csr[:, K:].astype(np.int64)
        if (parity != staircase).nnz:
            raise ConstructionError("parity part is not an accumulator staircase")
        self._Hi = H.csr[:, :K].astype(np.int64)
        super().__init__("accumulator", H, K, np.arange(K))

    def _encode(self, message: BitVector) -> BitVector:
        s = _mod2(self._Hi @ message.astype(np.int64))
        parity = np.bitwise_xor.accumulate(s)
        return np.concatenate([message, parity]).astype(np.uint8)


class GaussianEliminationEncoder(LdpcEncoder):
    """Generic encoder from one dense GF(2) elimination of H.

    Redundant rows are allowed; K = N - rank(H). Message bits occupy the non-pivot columns.
    """

    def __init__(self, H: ParityCheckMatrix):
        R, pivots = gf2_row_reduce(H.to_dense())
        free = np.setdiff1d(np.arange(H.N), pivots)
        if free.size == 0:
            raise ConstructionError(f"{H.name} has full column rank; the code is trivial")
        self._pivots = pivots
        self._P = sp.csr_matrix(R[:, free].astype(np.int64))
        logger.debug("eliminated %r: rank %d, K=%d", H, pivots.size, free.size)
        super().__init__("gaussian-elimination", H, int(free.size), free)

    def _encode(self, message: BitVector) -> BitVector:
        c = np.zeros(self.N, dtype=np.uint8)
        c[self.info_positions] = message
        c[self._pivots] = _mod2(self._P @ message.astype(np.int64))
        return c


def select_encoder(H: ParityCheckMatrix, core_rows: int = 4) -> LdpcEncoder:
    """Pick the cheapest encoder whose structural assumptions H satisfies.

    Raises:
        ConstructionError: no structured encoder applies and H is too large to eliminate.
    """
    attempts = []
    if H.base_graph is not None:
        attempts.append(lambda: DoubleDiagonalEncoder(H, core_rows))
    attempts.append(lambda: AccumulatorEncoder(H))
    attempts.append(lambda: GaussianEliminationEncoder(H))
    last: Optional[ConstructionError] = None
    for build in attempts:
        try:
            return build()
        except ConstructionError as exc:
            last = exc
            logger.debug("%s: %s", H.name, exc)
    raise ConstructionError(f"no encoder for {H.name}: {last}")


def encode(H: ParityCheckMatrix, message: ArrayLike) -> BitVector:
    """Encode one message with :func:`select_encoder` (build the encoder once for many frames)."""
    return select_encoder(H).encode(message)
