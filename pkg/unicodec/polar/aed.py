"""Automorphism ensemble decoding.

Permutations come from the block-lower-triangular affine (BLTA) automorphism group of a
decreasing polar code: z -> A z + b over GF(2), z the bit vector of an index (LSB first). The
diagonal blocks of A follow the stabilizer block profile and are invertible; entries below
the blocks and the translation b are free. SC absorbs the lower-triangular part, so distinct
ensemble members are required to differ in their diagonal blocks. Every constituent decoder
runs plain SC on permuted LLRs; the candidate with the largest correlation
sum_i (1 - 2 c_i) llr_i is kept.
"""

import logging
from concurrent.futures import Executor
from math import prod
from typing import Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike

from ..core.decoder import DecodeOutcome, Decoder
from ..core.exceptions import ConstructionError, DomainError
from ..core.types import LlrVector, SeedSpec
from .construct import PolarCodeSpec
from .sc import ScKernel, _prepare, decode_sc, outcome_from_codeword

logger = logging.getLogger(__name__)

_MAX_DRAWS_PER_PERMUTATION = 200


def _index_bits(indices: np.ndarray, n: int) -> np.ndarray:
    """(len, n) matrix, column k = bit k (LSB first)."""
    return ((indices[:, None] >> np.arange(n)[None, :]) & 1).astype(np.uint8)


def _bits_to_index(bits: np.ndarray) -> np.ndarray:
    return (bits.astype(np.int64) << np.arange(bits.shape[1])[None, :]).sum(axis=1)


def block_profile(info_mask: ArrayLike) -> list[int]:
    """Stabilizer block profile of an info set.

    Greedy from bit 0: the block starting at i0 ends at the largest i1 for which swapping index
    bits i0 and i1 maps the info set onto itself.
    """
    mask = np.asarray(info_mask, dtype=bool)
    N = mask.size
    n = N.bit_length() - 1
    if N != 1 << n:
        raise DomainError(f"mask length {N} is not a power of two")
    bits = _index_bits(np.flatnonzero(mask), n)
    profile: list[int] = []
    i0 = 0
    while i0 < n:
        i1 = n - 1
        while i1 > i0:
            swap = np.arange(n)
            swap[i0], swap[i1] = i1, i0
            if np.all(mask[_bits_to_index(bits[:, swap])]):
                break
            i1 -= 1
        profile.append(i1 - i0 + 1)
        i0 = i1 + 1
    return profile


def gl2_order(m: int) -> int:
    """Number of invertible m x m matrices over GF(2)."""
    return prod((1 << m) - (1 << i) for i in range(m))


def _is_invertible(A: np.ndarray) -> bool:
    A = A.copy()
    m = A.shape[0]
    for i in range(m):
        p = np.flatnonzero(A[i:, i])
        if p.size == 0:
            return False
        r = i + p[0]
        A[[i, r]] = A[[r, i]]
        A[i + 1:] ^= A[i + 1:, i, None] * A[i][None, :]
    return True


def _random_invertible(m: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        A = rng.integers(0, 2, size=(m, m), dtype=np.uint8)
        if _is_invertible(A):
            return A


def random_blta(profile: Sequence[int], rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Random BLTA map (A, b). A[k, l] with l left of k's block is free, diagonal blocks are
    invertible, everything above the blocks is zero."""
    n = sum(profile)
    A = np.zeros((n, n), dtype=np.uint8)
    start = 0
    for size in profile:
        A[start:start + size, start:start + size] = _random_invertible(size, rng)
        A[start:start + size, :start] = rng.integers(0, 2, size=(size, start), dtype=np.uint8)
        start += size
    b = rng.integers(0, 2, size=n, dtype=np.uint8)
    return A, b


def _diagonal_blocks(A: np.ndarray, profile: Sequence[int]) -> bytes:
    start = 0
    key = b""
    for size in profile:
        key += A[start:start + size, start:start + size].tobytes()
        start += size
    return key


def affine_permutation(A: np.ndarray, b: Optional[np.ndarray] = None) -> np.ndarray:
    """Permutation pi with pi[z] = A z + b over GF(2), z read as the bit vector of the index."""
    n = A.shape[0]
    z = _index_bits(np.arange(1 << n), n)
    image = z @ A.T.astype(np.int64)
    if b is not None:
        image = image + b[None, :]
    return _bits_to_index(image % 2)


def sample_automorphisms(spec: PolarCodeSpec, count: int, seed: SeedSpec) -> list[np.ndarray]:
    """``count`` distinct BLTA permutations, the identity first.

    No two members share their diagonal blocks.

    Raises:
        ConstructionError: the code carries no block profile, or the block-diagonal group
            has fewer than ``count`` elements.
    """
    if count < 1:
        raise DomainError(f"ensemble size must be >= 1, got {count}")
    if spec.block_profile is None:
        raise ConstructionError(f"code {spec.name!r} has no automorphism block profile")
    profile = list(spec.block_profile)
    group = prod(gl2_order(s) for s in profile)
    if count > group:
        raise ConstructionError(f"block profile {profile} allows only {group} SC-distinct permutations")
    rng = seed.generator()
    perms = [np.arange(spec.N)]
    seen = {_diagonal_blocks(np.eye(spec.n, dtype=np.uint8), profile)}
    draws = 0
    while len(perms) < count:
        draws += 1
        if draws > _MAX_DRAWS_PER_PERMUTATION * count:
            raise ConstructionError(f"could not draw {count} distinct permutations")
        A, b = random_blta(profile, rng)
        key = _diagonal_blocks(A, profile)
        if key not in seen:
            seen.add(key)
            perms.append(affine_permutation(A, b))
    logger.debug("sampled %d automorphisms for %s after %d draws", count, spec.name, draws)
    return perms


def correlation(codeword: np.ndarray, llr: np.ndarray) -> float:
    """sum_i (1 - 2 c_i) llr_i; larger is closer to the received word."""
    return float(np.dot(1.0 - 2.0 * codeword, llr))


def apply_permutation(x: ArrayLike, pi: np.ndarray) -> np.ndarray:
    """y[i] = x[pi[i]]."""
    return np.asarray(x)[pi]


def invert_permutation(pi: np.ndarray) -> np.ndarray:
    inv = np.empty_like(pi)
    inv[pi] = np.arange(pi.size)
    return inv


def _decode_permuted(spec: PolarCodeSpec, llr: np.ndarray, pi: np.ndarray, kernel: ScKernel) -> np.ndarray:
    c_perm = decode_sc(spec, apply_permutation(llr, pi), kernel=kernel).codeword
    return apply_permutation(c_perm, invert_permutation(pi))


def decode_aed(spec: PolarCodeSpec, llr: ArrayLike, ensemble_size: int, seed: SeedSpec,
               kernel: ScKernel = "minsum", executor: Optional[Executor] = None,
               permutations: Optional[list[np.ndarray]] = None) -> DecodeOutcome:
    """Run SC under each automorphism and keep the best-correlating candidate.

    Args:
        spec: Code with a block profile (see :func:`~unicodec.polar.construct.construct_aed_code`).
        llr: Channel LLRs.
        ensemble_size: Number of constituent decoders.
        seed: Seeds the permutation draw (ignored when ``permutations`` is given).
        kernel: SC f-kernel.
        executor: Optional pool for the constituent decodes; results are collected in
            permutation order.
        permutations: Pre-sampled permutations, identity first.
    """
    alpha = _prepare(spec, llr)
    perms = permutations if permutations is not None else sample_automorphisms(spec, ensemble_size, seed)
    perms = perms[:ensemble_size]
    if executor is not None:
        futures = [executor.submit(_decode_permuted, spec, alpha, pi, kernel) for pi in perms]
        candidates = [fut.result() for fut in futures]
    else:
        candidates = [_decode_permuted(spec, alpha, pi, kernel) for pi in perms]
    scores = np.array([correlation(c, alpha) for c in candidates])
    # argmax returns the first maximum, so ties go to the lower permutation index
    best = int(np.argmax(scores))
    outcome = outcome_from_codeword(spec, candidates[best], metric=float(scores[best]))
    outcome.extra["selected"] = best
    return outcome


class AedDecoder(Decoder):
    """AE-SC decoder with a fixed permutation set drawn once at construction."""

    def __init__(self, spec: PolarCodeSpec, ensemble_size: int = 8, seed: Optional[SeedSpec] = None,
                 kernel: ScKernel = "minsum"):
        super().__init__(name=f"AE-SC-{ensemble_size}")
        self.spec = spec
        self.ensemble_size = ensemble_size
        self.seed = seed or SeedSpec()
        self.kernel = kernel
        self.permutations = sample_automorphisms(spec, ensemble_size, self.seed)

    def decode(self, llr: LlrVector) -> DecodeOutcome:
        return decode_aed(self.spec, llr, self.ensemble_size, self.seed, kernel=self.kernel,
                          permutations=self.permutations)

    def describe(self):
        return {"decoder": self.name, "ensemble_size": self.ensemble_size,
                "block_profile": list(self.spec.block_profile or []), "code": self.spec.name}
