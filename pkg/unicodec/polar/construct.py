"""Polar code construction.

Conventions: G_N = [[1,0],[1,1]]^{(x)n} in natural index order (bit 0 of an index is its
LSB), codeword c = u G_N, SC decodes u_0 .. u_{N-1}. Under this convention u_{N-1} is the
most reliable synthetic channel and e_{N-1} G_N is the all-ones word.

Reliabilities come from Gaussian-approximation density evolution: the mean m of the
(consistent Gaussian) LLR of each synthetic channel is tracked through the polarization
tree, check combining via the phi-function and variable combining by addition.
"""

import logging
from typing import Literal, Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.optimize import brentq
from scipy.special import log_ndtr

from ..core.channel import ebn0_to_sigma
from ..core.exceptions import ConstructionError, DomainError
from ..core.types import LLR_SATURATION, BitVector, LlrVector, as_bits
from ..outer.crc import CrcSpec, crc_append

logger = logging.getLogger(__name__)

# phi(x) = exp(A x^B + C) below PHI_SWITCH, sqrt(pi/x) exp(-x/4) (1 - 10/(7x)) above
PHI_A, PHI_B, PHI_C = -0.4527, 0.86, 0.0218
PHI_SWITCH = 10.0
_INV_BISECT_STEPS = 80
_LOG_PHI_SWITCH = PHI_A * PHI_SWITCH**PHI_B + PHI_C


def _log2_exact(N: int) -> int:
    if N < 1 or N & (N - 1):
        raise DomainError(f"length {N} is not a power of two")
    return N.bit_length() - 1


# --- Polar transform ---
def polar_transform(u: ArrayLike) -> np.ndarray:
    """u G_N over GF(2) with n butterfly passes; works on the last axis of a batch.

    G_N is an involution over GF(2), so the same call inverts an encoding.
    """
    arr = np.asarray(u)
    N = arr.shape[-1]
    n = _log2_exact(N)
    x = arr.astype(np.uint8, copy=True)
    lead = x.shape[:-1]
    for s in range(n):
        d = 1 << s
        view = x.reshape(*lead, N // (2 * d), 2, d)
        view[..., 0, :] ^= view[..., 1, :]
    return x


# --- Gaussian approximation ---
def log_phi(x: np.ndarray) -> np.ndarray:
    """log phi(x) for x >= 0 (phi(0) = 1)."""
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    low = (x > 0) & (x < PHI_SWITCH)
    high = x >= PHI_SWITCH
    out[low] = PHI_A * np.power(x[low], PHI_B) + PHI_C
    xh = x[high]
    tail = 0.5 * np.log(np.pi / xh) - xh / 4.0 + np.log1p(-10.0 / (7.0 * xh))
    # the two pieces do not meet exactly; clamp so phi stays non-increasing
    out[high] = np.minimum(tail, _LOG_PHI_SWITCH)
    return np.minimum(out, 0.0)


def phi_inverse_from_log(log_y: np.ndarray) -> np.ndarray:
    """Piecewise inverse of phi given log(y).

    Closed form on the power-law piece; on the asymptotic piece the monotone function is
    inverted by vectorized bisection.
    """
    log_y = np.minimum(np.asarray(log_y, dtype=np.float64), 0.0)
    out = np.zeros_like(log_y)
    head = log_y >= _LOG_PHI_SWITCH
    out[head] = np.power(np.maximum((log_y[head] - PHI_C) / PHI_A, 0.0), 1.0 / PHI_B)
    tail = ~head
    if np.any(tail):
        target = log_y[tail]
        lo = np.full(target.shape, PHI_SWITCH)
        hi = np.maximum(-4.0 * target + 50.0, 2 * PHI_SWITCH)
        for _ in range(_INV_BISECT_STEPS):
            mid = 0.5 * (lo + hi)
            above = log_phi(mid) > target
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
        out[tail] = 0.5 * (lo + hi)
    return out


def _check_mean(m: np.ndarray) -> np.ndarray:
    """Mean of the check-combined LLR of two i.i.d. channels of mean m."""
    lp = log_phi(m)
    # 1 - (1 - phi)^2 = phi (2 - phi)
    return phi_inverse_from_log(lp + np.log(2.0 - np.exp(lp)))


def density_evolution_reliabilities(n: int, design_sigma: float) -> np.ndarray:
    """Per-synthetic-channel mean LLR under the Gaussian approximation (higher = better).

    Args:
        n: log2 of the block length (n >= 1).
        design_sigma: Noise standard deviation of the design channel.

    Returns:
        Array of length 2^n, entry i the LLR mean of synthetic channel i.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if design_sigma <= 0:
        raise DomainError(f"design sigma must be positive, got {design_sigma}")
    means = np.array([2.0 / design_sigma**2])
    for _ in range(n):
        nxt = np.empty(2 * means.size)
        nxt[0::2] = _check_mean(means)
        nxt[1::2] = 2.0 * means
        means = nxt
    return means


def bit_error_log_probabilities(means: np.ndarray) -> np.ndarray:
    """log Q(sqrt(m/2)) per channel (error probability of a mean-m consistent Gaussian LLR)."""
    return log_ndtr(-np.sqrt(np.asarray(means, dtype=np.float64) / 2.0))


def ga_predicted_fer(means: np.ndarray, info_set: Sequence[int]) -> float:
    """Union-bound SC frame error estimate: sum over the info set of Q(sqrt(m_i/2))."""
    idx = np.asarray(info_set, dtype=np.int64)
    if idx.size == 0:
        return 0.0
    return float(min(1.0, np.exp(bit_error_log_probabilities(means[idx])).sum()))


def select_info_set(rel: ArrayLike, K: int) -> np.ndarray:
    """Indices of the K largest reliabilities, ties toward the larger index, sorted ascending."""
    rel = np.asarray(rel, dtype=np.float64)
    N = rel.size
    if K < 0 or K > N:
        raise DomainError(f"K={K} outside [0, {N}]")
    order = np.lexsort((np.arange(N), rel))
    return np.sort(order[N - K:])


def design_ebn0_for_target(n: int, K: int, target_fer: float = 1e-6,
                           forbidden: Sequence[int] = ()) -> float:
    """Eb/N0 (dB) at which the GA-predicted SC FER of the best-K code equals ``target_fer``."""
    N = 1 << n
    if not (0 < K <= N):
        raise DomainError(f"K={K} outside (0, {N}]")
    rate = K / N
    blocked = np.asarray(list(forbidden), dtype=np.int64)

    def excess(ebn0_db: float) -> float:
        rel = density_evolution_reliabilities(n, ebn0_to_sigma(ebn0_db, rate))
        if blocked.size:
            rel = rel.copy()
            rel[blocked] = -np.inf
        info = select_info_set(rel, K)
        return np.log(max(ga_predicted_fer(rel, info), 1e-300)) - np.log(target_fer)

    lo, hi = -10.0, 30.0
    if excess(hi) > 0:
        raise ConstructionError(f"target FER {target_fer} unreachable for (N={N}, K={K})")
    return float(brentq(excess, lo, hi, xtol=1e-4))


def design_sigma_for_target(n: int, K: int, target_fer: float = 1e-6) -> float:
    """Design-channel sigma of :func:`design_ebn0_for_target` at rate K/2^n."""
    return ebn0_to_sigma(design_ebn0_for_target(n, K, target_fer), K / (1 << n))


# --- Reliability sequences ---
class ReliabilitySequence(BaseModel):
    """Permutation of {0..N_max-1} from least to most reliable."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    order: tuple[int, ...]
    design_snr_db: float
    target_fer: Optional[float] = None

    @model_validator(mode="after")
    def _bijection(self) -> "ReliabilitySequence":
        N = len(self.order)
        if N == 0 or N & (N - 1):
            raise ValueError(f"sequence length {N} is not a power of two")
        if sorted(self.order) != list(range(N)):
            raise ValueError("order is not a permutation of 0..N-1")
        return self

    @property
    def n(self) -> int:
        return len(self.order).bit_length() - 1

    def info_set(self, K: int, forbidden: Sequence[int] = ()) -> np.ndarray:
        """The K most reliable indices not in ``forbidden``."""
        blocked = set(int(i) for i in forbidden)
        picked = [i for i in reversed(self.order) if i not in blocked][:K]
        if len(picked) < K:
            raise ConstructionError(f"only {len(picked)} admissible positions for K={K}")
        return np.sort(np.asarray(picked, dtype=np.int64))


def build_reliability_sequence(n: int, design_snr_db: float, rate: float = 0.5) -> ReliabilitySequence:
    """Order synthetic channels by GA mean at a fixed design point."""
    rel = density_evolution_reliabilities(n, ebn0_to_sigma(design_snr_db, rate))
    order = np.lexsort((np.arange(rel.size), rel))
    return ReliabilitySequence(order=tuple(int(i) for i in order), design_snr_db=design_snr_db)


def rate_flexible_sequence(n: int, target_fer: float = 1e-6, snr_grid: Optional[np.ndarray] = None,
                           rate: float = 0.5) -> ReliabilitySequence:
    """Order channels by the SNR at which each reaches ``target_fer`` bit error probability.

    Channels that reach the target at a lower SNR are more reliable; ties (channels that
    cross on the same grid step) are broken by their GA mean at the last grid point.
    """
    if snr_grid is None:
        snr_grid = np.arange(-5.0, 15.0 + 1e-9, 0.05)
    N = 1 << n
    crossing = np.full(N, np.inf)
    log_target = np.log(target_fer)
    rel = None
    for snr in snr_grid:
        rel = density_evolution_reliabilities(n, ebn0_to_sigma(float(snr), rate))
        reached = (bit_error_log_probabilities(rel) <= log_target) & np.isinf(crossing)
        crossing[reached] = snr
    # least reliable first: latest crossing, then smallest mean
    order = np.lexsort((np.arange(N), rel, -crossing))
    return ReliabilitySequence(order=tuple(int(i) for i in order), design_snr_db=float(snr_grid[-1]),
                               target_fer=target_fer)


def extract_nested(seq: ReliabilitySequence, n_short: int) -> ReliabilitySequence:
    """Restrict a master sequence to indices below 2^n_short, keeping their relative order."""
    if n_short < 1 or n_short > seq.n:
        raise DomainError(f"n_short={n_short} outside [1, {seq.n}]")
    limit = 1 << n_short
    return ReliabilitySequence(order=tuple(i for i in seq.order if i < limit),
                               design_snr_db=seq.design_snr_db, target_fer=seq.target_fer)


# --- Partial order (AED-friendly designs) ---
def _upper_neighbours(i: int, n: int) -> list[int]:
    out = []
    if i & 1 == 0:
        out.append(i + 1)
    for k in range(1, n):
        if (i >> k) & 1 == 0 and (i >> (k - 1)) & 1 == 1:
            out.append(i + (1 << (k - 1)))
    return out


def partial_order_closure(i_min: Sequence[int], n: int) -> np.ndarray:
    """All indices that dominate some seed index under the polar partial order."""
    N = 1 << n
    mask = np.zeros(N, dtype=bool)
    stack = [int(i) for i in i_min]
    for i in stack:
        if not 0 <= i < N:
            raise DomainError(f"seed index {i} outside [0, {N})")
    while stack:
        i = stack.pop()
        if mask[i]:
            continue
        mask[i] = True
        stack.extend(j for j in _upper_neighbours(i, n) if not mask[j])
    return np.flatnonzero(mask)


def info_set_from_min(i_min: Sequence[int], n: int, K: int, rel: ArrayLike) -> np.ndarray:
    """Closure of ``i_min`` under the partial order, filled up to K by reliability.

    Fill indices are only admitted once every index above them is already in the set, so the
    result stays a decreasing set (closed upwards) and keeps the affine automorphisms.
    """
    closure = partial_order_closure(i_min, n)
    if closure.size > K:
        raise ConstructionError(f"closure of I_min has {closure.size} indices, more than K={K}")
    N = 1 << n
    rel = np.asarray(rel, dtype=np.float64)
    chosen = np.zeros(N, dtype=bool)
    chosen[closure] = True
    uppers = [_upper_neighbours(i, n) for i in range(N)]
    while chosen.sum() < K:
        ready = [i for i in range(N) if not chosen[i] and all(chosen[j] for j in uppers[i])]
        best = max(ready, key=lambda i: (rel[i], i))
        chosen[best] = True
    return np.flatnonzero(chosen)


# --- Code specification ---
class LengthMatch(BaseModel):
    """Puncturing drops the first ``count`` code bits; shortening fixes the last ``count`` to zero."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["none", "punctured", "shortened"] = "none"
    count: int = Field(default=0, ge=0)

    def positions(self, N: int) -> np.ndarray:
        if self.kind == "punctured":
            return np.arange(self.count)
        if self.kind == "shortened":
            return np.arange(N - self.count, N)
        return np.arange(0)

    def blocked_u(self, N: int) -> np.ndarray:
        """u positions that cannot carry information under this matching."""
        return self.positions(N)


class PolarCodeSpec(BaseModel):
    """A polar code: info set, optional CRC pre-transform and length matching."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "polar"
    n: int = Field(ge=1, le=24)
    K: int = Field(ge=0)
    info_set: tuple[int, ...]
    crc: Optional[CrcSpec] = None
    length_match: LengthMatch = LengthMatch()
    design_snr_db: Optional[float] = None
    # Automorphism descriptor: stabilizer block profile of the info set (AED designs only)
    block_profile: Optional[tuple[int, ...]] = None
    i_min: Optional[tuple[int, ...]] = None

    @model_validator(mode="after")
    def _check(self) -> "PolarCodeSpec":
        N = 1 << self.n
        if len(self.info_set) != self.K:
            raise ValueError(f"|info_set|={len(self.info_set)} != K={self.K}")
        if list(self.info_set) != sorted(set(self.info_set)):
            raise ValueError("info_set must be sorted and duplicate-free")
        if self.info_set and not (0 <= self.info_set[0] and self.info_set[-1] < N):
            raise ValueError(f"info_set indices must lie in [0, {N})")
        if self.crc is not None and self.crc.degree > self.K:
            raise ValueError(f"CRC degree {self.crc.degree} exceeds K={self.K}")
        if self.length_match.count >= N:
            raise ValueError("length matching removes the whole block")
        if self.length_match.kind == "shortened":
            overlap = set(self.length_match.positions(N).tolist()) & set(self.info_set)
            if overlap:
                raise ValueError(f"shortened positions overlap the info set: {sorted(overlap)[:8]}")
        if self.block_profile is not None and sum(self.block_profile) != self.n:
            raise ValueError("block profile must partition the n index bits")
        return self

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def transmitted_length(self) -> int:
        return self.N - self.length_match.count

    @property
    def payload_bits(self) -> int:
        return self.K - (self.crc.degree if self.crc else 0)

    @property
    def rate(self) -> float:
        return self.payload_bits / self.transmitted_length

    @property
    def info_mask(self) -> np.ndarray:
        mask = np.zeros(self.N, dtype=bool)
        mask[list(self.info_set)] = True
        return mask

    @property
    def frozen_set(self) -> np.ndarray:
        return np.flatnonzero(~self.info_mask)


def construct_polar_code(
    N: int,
    K: int,
    design_snr_db: Optional[float] = None,
    crc: Optional[CrcSpec] = None,
    length_match: Optional[LengthMatch] = None,
    target_fer: float = 1e-6,
    name: str = "polar",
) -> PolarCodeSpec:
    """DE/GA construction. Without a design SNR one is searched so the GA-predicted FER hits
    ``target_fer``. ``K`` counts CRC bits; the rate used for the design channel is K/N_target.
    """
    n = _log2_exact(N)
    length_match = length_match or LengthMatch()
    blocked = length_match.blocked_u(N)
    if design_snr_db is None:
        design_snr_db = design_ebn0_for_target(n, K, target_fer, forbidden=blocked)
        logger.info("design SNR for (N=%d, K=%d) at target FER %.1e: %.3f dB", N, K, target_fer, design_snr_db)
    rate = K / (N - length_match.count)
    rel = density_evolution_reliabilities(n, ebn0_to_sigma(design_snr_db, min(rate, 1.0)))
    if blocked.size:
        rel = rel.copy()
        rel[blocked] = -np.inf
    info = select_info_set(rel, K)
    if blocked.size and np.intersect1d(info, blocked).size:
        raise ConstructionError(f"K={K} needs length-matched positions")
    return PolarCodeSpec(name=name, n=n, K=K, info_set=tuple(int(i) for i in info), crc=crc,
                         length_match=length_match, design_snr_db=round(float(design_snr_db), 6))


def construct_from_sequence(seq: ReliabilitySequence, N: int, K: int, crc: Optional[CrcSpec] = None,
                            length_match: Optional[LengthMatch] = None, name: str = "polar") -> PolarCodeSpec:
    """Pick the info set from a (possibly longer, nested) reliability sequence."""
    n = _log2_exact(N)
    if n < seq.n:
        seq = extract_nested(seq, n)
    elif n > seq.n:
        raise DomainError(f"sequence covers N={len(seq.order)}, need N={N}")
    length_match = length_match or LengthMatch()
    info = seq.info_set(K, forbidden=length_match.blocked_u(N).tolist())
    return PolarCodeSpec(name=name, n=n, K=K, info_set=tuple(int(i) for i in info), crc=crc,
                         length_match=length_match, design_snr_db=seq.design_snr_db)


def construct_aed_code(N: int, K: int, i_min: Sequence[int], design_snr_db: Optional[float] = None,
                       crc: Optional[CrcSpec] = None, name: str = "polar-aed",
                       target_fer: float = 1e-6) -> PolarCodeSpec:
    """Automorphism-friendly design: partial-order closure of I_min, filled by GA reliability.

    Without ``design_snr_db`` the design Eb/N0 is searched so the best-K code reaches ``target_fer``.
    """
    from .aed import block_profile

    n = _log2_exact(N)
    if design_snr_db is None:
        design_snr_db = round(design_ebn0_for_target(n, K, target_fer), 6)
        logger.info("design SNR for AED (N=%d, K=%d) at target FER %.1e: %.3f dB", N, K, target_fer, design_snr_db)
    rel = density_evolution_reliabilities(n, ebn0_to_sigma(design_snr_db, K / N))
    info = info_set_from_min(i_min, n, K, rel)
    mask = np.zeros(N, dtype=bool)
    mask[info] = True
    profile = block_profile(mask)
    return PolarCodeSpec(name=name, n=n, K=K, info_set=tuple(int(i) for i in info), crc=crc,
                         design_snr_db=design_snr_db, block_profile=tuple(profile),
                         i_min=tuple(int(i) for i in i_min))


# --- Encoding and length matching ---
def polar_encode(spec: PolarCodeSpec, message: ArrayLike) -> BitVector:
    """Payload -> (CRC) -> info positions -> u G_N. Returns the full length-N codeword."""
    bits = as_bits(message)
    if bits.size != spec.payload_bits:
        raise DomainError(f"message length {bits.size} != {spec.payload_bits}")
    if spec.crc is not None:
        bits = crc_append(bits, spec.crc)
    u = np.zeros(spec.N, dtype=np.uint8)
    u[spec.info_mask] = bits
    return polar_transform(u)


def length_match_transmit(spec: PolarCodeSpec, codeword: ArrayLike) -> BitVector:
    """Drop punctured/shortened positions before transmission."""
    bits = as_bits(codeword)
    if bits.size != spec.N:
        raise DomainError(f"codeword length {bits.size} != N={spec.N}")
    keep = np.ones(spec.N, dtype=bool)
    keep[spec.length_match.positions(spec.N)] = False
    return bits[keep]


def apply_length_match(spec: PolarCodeSpec, llr: ArrayLike) -> LlrVector:
    """Rebuild a length-N LLR vector: punctured -> 0, shortened -> +saturation."""
    llr = np.asarray(llr, dtype=np.float64)
    lm = spec.length_match
    if llr.size == spec.N and lm.count == 0:
        return llr
    if llr.size != spec.transmitted_length:
        raise DomainError(f"LLR length {llr.size} != transmitted length {spec.transmitted_length}")
    full = np.empty(spec.N, dtype=np.float64)
    removed = np.zeros(spec.N, dtype=bool)
    removed[lm.positions(spec.N)] = True
    full[~removed] = llr
    full[removed] = LLR_SATURATION if lm.kind == "shortened" else 0.0
    return full


def nr_like_polar_spec(N: int = 256, K: int = 128, crc: Optional[CrcSpec] = None,
                       design_snr_db: Optional[float] = None) -> PolarCodeSpec:
    """CA-SCL configuration: K total bits of which ``crc.degree`` are CRC (default CRC-11)."""
    from ..outer.crc import CRC11

    crc = crc or CRC11
    return construct_polar_code(N, K, design_snr_db=design_snr_db, crc=crc, name=f"polar-{crc.name}")
