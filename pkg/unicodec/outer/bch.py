"""Binary BCH codes: GF(2^m) arithmetic, systematic encoding, Berlekamp-Massey decoding.

Bit order: index 0 of a word is the highest-degree coefficient; the message occupies the
first k positions and the parity the last n - k (systematic, shortened codes allowed).
"""

import logging
from functools import cached_property
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field, field_serializer

from ..core.exceptions import ConstructionError, DomainError
from ..core.types import BitVector, as_bits

logger = logging.getLogger(__name__)

# Default primitive polynomials (including the leading term); m=16 is the DVB-S2 choice
# x^16 + x^5 + x^3 + x^2 + 1.
PRIMITIVE_POLYNOMIALS = {
    3: 0xB, 4: 0x13, 5: 0x25, 6: 0x43, 7: 0x89, 8: 0x11D, 9: 0x211, 10: 0x409,
    11: 0x805, 12: 0x1053, 13: 0x201B, 14: 0x4443, 15: 0x8003, 16: 0x1002D,
}


class GaloisField:
    """GF(2^m) with exponent/logarithm tables; elements are ints in [0, 2^m)."""

    def __init__(self, m: int, primitive_poly: Optional[int] = None):
        if m not in PRIMITIVE_POLYNOMIALS and primitive_poly is None:
            raise DomainError(f"no default primitive polynomial for m={m}")
        self.m = m
        self.size = 1 << m
        self.order = self.size - 1
        self.primitive_poly = primitive_poly or PRIMITIVE_POLYNOMIALS[m]
        if self.primitive_poly.bit_length() - 1 != m:
            raise ConstructionError(f"polynomial {self.primitive_poly:#x} has degree != {m}")

        exp = np.zeros(2 * self.order, dtype=np.int64)
        log = np.full(self.size, -1, dtype=np.int64)
        x = 1
        for i in range(self.order):
            if log[x] != -1:
                raise ConstructionError(f"polynomial {self.primitive_poly:#x} is not primitive")
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & self.size:
                x ^= self.primitive_poly
        exp[self.order:] = exp[: self.order]
        self.exp = exp
        self.log = log

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in GF(2^m)")
        return int(self.exp[(self.order - self.log[a]) % self.order])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def alpha_pow(self, e: int) -> int:
        return int(self.exp[e % self.order])

    def minimal_polynomial(self, e: int) -> int:
        """Minimal polynomial of alpha^e over GF(2), as a bit mask (bit i = coeff of x^i)."""
        coset = []
        j = e % self.order
        while j not in coset:
            coset.append(j)
            j = (2 * j) % self.order
        # product of (x + alpha^j) with coefficients in GF(2^m), lowest degree first
        coeffs = [1]
        for j in coset:
            root = self.alpha_pow(j)
            nxt = [0] * (len(coeffs) + 1)
            for i, c in enumerate(coeffs):
                nxt[i + 1] ^= c
                nxt[i] ^= self.mul(c, root)
            coeffs = nxt
        if any(c not in (0, 1) for c in coeffs):
            raise ConstructionError(f"minimal polynomial of alpha^{e} is not binary")
        return sum(c << i for i, c in enumerate(coeffs))


def _clmul(a: int, b: int) -> int:
    """Carry-less product of two GF(2) polynomials."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def _poly_mod(a: int, g: int) -> int:
    dg = g.bit_length() - 1
    while a and a.bit_length() - 1 >= dg:
        a ^= g << (a.bit_length() - 1 - dg)
    return a


def bch_generator(field: GaloisField, t: int) -> int:
    """Generator = LCM of the minimal polynomials of alpha^1 .. alpha^(2t)."""
    g = 1
    seen: set[int] = set()
    for e in range(1, 2 * t + 1):
        mp = field.minimal_polynomial(e)
        if mp in seen:
            continue
        seen.add(mp)
        g = _clmul(g, mp)
    return g


class BchSpec(BaseModel):
    """A (possibly shortened) binary BCH code of length n, dimension k, correcting t errors."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    m: int = Field(ge=3, le=16)
    t: int = Field(ge=1)
    n: int
    k: int
    generator: int
    primitive_poly: int

    @field_serializer("generator", "primitive_poly")
    def _to_hex(self, value: int) -> str:
        return f"{value:#x}"

    @classmethod
    def build(cls, m: int, t: int, n: Optional[int] = None, primitive_poly: Optional[int] = None) -> "BchSpec":
        """Construct the narrow-sense BCH code; ``n`` < 2^m - 1 shortens it."""
        field = GaloisField(m, primitive_poly)
        n_full = field.order
        n = n_full if n is None else n
        g = bch_generator(field, t)
        parity = g.bit_length() - 1
        if not (parity < n <= n_full):
            raise ConstructionError(f"length {n} incompatible with m={m}, t={t} (parity {parity})")
        # generator divides x^n_full - 1 by construction
        if _poly_mod((1 << n_full) | 1, g) != 0:
            raise ConstructionError("generator does not divide x^n - 1")
        return cls(m=m, t=t, n=n, k=n - parity, generator=g, primitive_poly=field.primitive_poly)

    @property
    def parity_bits(self) -> int:
        return self.n - self.k

    @cached_property
    def field(self) -> GaloisField:
        return GaloisField(self.m, self.primitive_poly)


# DVB-S2 normal FECFRAME outer codes (Kbch, Nbch = Kldpc)
DVBS2_BCH_NORMAL = {
    "1/2": {"m": 16, "t": 12, "n": 32400},
    "8/9": {"m": 16, "t": 8, "n": 57600},
}


def dvbs2_bch(rate: str) -> BchSpec:
    try:
        params = DVBS2_BCH_NORMAL[rate]
    except KeyError as e:
        raise DomainError(f"no DVB-S2 BCH preset for rate {rate!r}") from e
    return BchSpec.build(**params)


class BchResult(BaseModel):
    """Decoder output; failure is reported here, never raised."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    word: np.ndarray
    message: np.ndarray
    error_count: int
    success: bool


def bch_encode(msg: ArrayLike, spec: BchSpec) -> BitVector:
    """Systematic encoding: [msg | msg(x) x^(n-k) mod g(x)]."""
    bits = as_bits(msg)
    if bits.size != spec.k:
        raise DomainError(f"message length {bits.size} != k={spec.k}")
    r = spec.parity_bits
    mask = (1 << r) - 1
    poly = spec.generator & mask
    reg = 0
    top = r - 1
    for b in bits.tolist():
        feedback = ((reg >> top) & 1) ^ b
        reg = (reg << 1) & mask
        if feedback:
            reg ^= poly
    parity = np.array([(reg >> (top - i)) & 1 for i in range(r)], dtype=np.uint8)
    return np.concatenate([bits, parity])


def _syndromes(word: BitVector, spec: BchSpec, field: GaloisField) -> np.ndarray:
    degrees = (spec.n - 1 - np.flatnonzero(word)).astype(np.int64)
    syn = np.zeros(2 * spec.t + 1, dtype=np.int64)
    if degrees.size == 0:
        return syn
    for j in range(1, 2 * spec.t + 1):
        syn[j] = np.bitwise_xor.reduce(field.exp[(j * degrees) % field.order])
    return syn


def _berlekamp_massey(syn: np.ndarray, t: int, field: GaloisField) -> list[int]:
    """Error-locator polynomial (lowest degree first) from syndromes S_1..S_2t."""
    lam = [1] + [0] * (2 * t)
    prev = [1] + [0] * (2 * t)
    length = 0
    shift = 1
    b = 1
    for r in range(2 * t):
        # discrepancy
        d = int(syn[r + 1])
        for i in range(1, length + 1):
            d ^= field.mul(lam[i], int(syn[r + 1 - i]))
        if d == 0:
            shift += 1
            continue
        coef = field.div(d, b)
        updated = lam.copy()
        for i in range(len(prev) - shift):
            if prev[i]:
                updated[i + shift] ^= field.mul(coef, prev[i])
        if 2 * length <= r:
            prev = lam
            length = r + 1 - length
            b = d
            shift = 1
        else:
            shift += 1
        lam = updated
    return lam[: length + 1]


def _chien_search(lam: list[int], spec: BchSpec, field: GaloisField) -> np.ndarray:
    """Degrees d in [0, n) with lambda(alpha^-d) = 0."""
    degrees = np.arange(spec.n, dtype=np.int64)
    acc = np.zeros(spec.n, dtype=np.int64)
    for k, coef in enumerate(lam):
        if coef == 0:
            continue
        acc ^= field.exp[(field.log[coef] - k * degrees) % field.order]
    return np.flatnonzero(acc == 0)


def bch_decode(word: ArrayLike, spec: BchSpec) -> BchResult:
    """Correct up to t errors; ``success`` is False when the locator is inconsistent."""
    received = as_bits(word)
    if received.size != spec.n:
        raise DomainError(f"word length {received.size} != n={spec.n}")
    field = spec.field
    syn = _syndromes(received, spec, field)
    if not np.any(syn[1:]):
        return BchResult(word=received.copy(), message=received[: spec.k].copy(), error_count=0, success=True)

    lam = _berlekamp_massey(syn, spec.t, field)
    n_errors = len(lam) - 1
    if n_errors > spec.t:
        return BchResult(word=received.copy(), message=received[: spec.k].copy(), error_count=n_errors, success=False)

    roots = _chien_search(lam, spec, field)
    if roots.size != n_errors:
        logger.debug("BCH locator degree %d but %d roots in the shortened range", n_errors, roots.size)
        return BchResult(word=received.copy(), message=received[: spec.k].copy(), error_count=n_errors, success=False)

    corrected = received.copy()
    corrected[spec.n - 1 - roots] ^= 1
    if np.any(_syndromes(corrected, spec, field)[1:]):
        return BchResult(word=received.copy(), message=received[: spec.k].copy(), error_count=n_errors, success=False)
    return BchResult(word=corrected, message=corrected[: spec.k].copy(), error_count=n_errors, success=True)
