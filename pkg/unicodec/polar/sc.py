"""Successive-cancellation decoding and its simplified (node-pruning) variant.

For a node with LLRs alpha of length M, a = alpha[:M/2], b = alpha[M/2:]:

    left  child: f(a, b)
    right child: g(a, b, beta_l) = b + (1 - 2 beta_l) a
    node output: beta = [beta_l ^ beta_r, beta_r]

Leaves decide 0 when frozen, else 1 iff their LLR is negative.
"""

import logging
from enum import Enum
from typing import Callable, Literal, Optional

import numpy as np
from numpy.typing import ArrayLike

from ..core.decoder import DecodeOutcome, Decoder
from ..core.exceptions import DomainError
from ..core.types import LlrVector, as_llrs
from ..outer.crc import crc_check
from .construct import PolarCodeSpec, apply_length_match, polar_transform

logger = logging.getLogger(__name__)

ScKernel = Literal["minsum", "exact"]


class ScNodeKind(str, Enum):
    RATE0 = "Rate0"
    RATE1 = "Rate1"
    REP = "Rep"
    SPC = "Spc"
    GENERIC = "Generic"


def f_minsum(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))


def f_exact(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Box-plus 2 atanh(tanh(a/2) tanh(b/2)) in a form that is stable for large magnitudes."""
    return f_minsum(a, b) + np.log1p(np.exp(-np.abs(a + b))) - np.log1p(np.exp(-np.abs(a - b)))


def g_kernel(a: np.ndarray, b: np.ndarray, beta: np.ndarray) -> np.ndarray:
    return b + np.where(beta == 1, -a, a)


F_KERNELS: dict[str, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    "minsum": f_minsum,
    "exact": f_exact,
}


def classify_node(frozen_mask: ArrayLike) -> ScNodeKind:
    """Kind of the constituent code a subtree with this frozen pattern implements.

    Rep keeps only the last leaf (the all-ones row); Spc freezes only the first leaf.
    """
    frozen = np.asarray(frozen_mask, dtype=bool)
    M = frozen.size
    n_frozen = int(frozen.sum())
    if n_frozen == M:
        return ScNodeKind.RATE0
    if n_frozen == 0:
        return ScNodeKind.RATE1
    if n_frozen == M - 1 and not frozen[-1]:
        return ScNodeKind.REP
    if n_frozen == 1 and frozen[0]:
        return ScNodeKind.SPC
    return ScNodeKind.GENERIC


def node_plan(frozen: np.ndarray) -> dict[tuple[int, int], ScNodeKind]:
    """Classify the top-most special nodes of the decoding tree, keyed by (offset, size)."""
    plan: dict[tuple[int, int], ScNodeKind] = {}

    def visit(lo: int, size: int) -> None:
        kind = classify_node(frozen[lo:lo + size])
        plan[(lo, size)] = kind
        if kind is ScNodeKind.GENERIC:
            visit(lo, size // 2)
            visit(lo + size // 2, size // 2)

    visit(0, frozen.size)
    return plan


class _ScPass:
    """One SC traversal; counts elementary kernel operations in ``ops``."""

    def __init__(self, frozen: np.ndarray, kernel: ScKernel = "minsum",
                 plan: Optional[dict[tuple[int, int], ScNodeKind]] = None):
        if kernel not in F_KERNELS:
            raise DomainError(f"unknown SC kernel {kernel!r}")
        self.frozen = frozen
        self.f = F_KERNELS[kernel]
        self.plan = plan
        self.ops = 0

    def run(self, alpha: np.ndarray, lo: int) -> np.ndarray:
        M = alpha.size
        if M == 1:
            self.ops += 1
            if self.frozen[lo]:
                return np.zeros(1, dtype=np.uint8)
            return (alpha < 0).astype(np.uint8)
        if self.plan is not None:
            beta = self._special(self.plan.get((lo, M), ScNodeKind.GENERIC), alpha)
            if beta is not None:
                return beta
        h = M // 2
        a, b = alpha[:h], alpha[h:]
        left = self.run(self.f(a, b), lo)
        right = self.run(g_kernel(a, b, left), lo + h)
        # h f-ops, h g-ops, h partial-sum xors
        self.ops += 3 * h
        return np.concatenate([left ^ right, right])

    def _special(self, kind: ScNodeKind, alpha: np.ndarray) -> Optional[np.ndarray]:
        """Closed-form node decoders; None falls back to the generic recursion.

        Zero LLRs and magnitude ties make min-sum SC resolve differently from the closed forms,
        so those nodes take the generic path.
        """
        M = alpha.size
        if kind is ScNodeKind.RATE0:
            return np.zeros(M, dtype=np.uint8)
        if kind is ScNodeKind.RATE1:
            if np.any(alpha == 0):
                return None
            self.ops += M
            return (alpha < 0).astype(np.uint8)
        if kind is ScNodeKind.REP:
            # same summation tree as the chain of g-ops in SC
            s = alpha
            while s.size > 1:
                h = s.size // 2
                s = s[h:] + s[:h]
            self.ops += M
            return np.full(M, 1 if s[0] < 0 else 0, dtype=np.uint8)
        if kind is ScNodeKind.SPC:
            if np.any(alpha == 0):
                return None
            hard = (alpha < 0).astype(np.uint8)
            self.ops += 2 * M
            if hard.sum() % 2:
                mags = np.abs(alpha)
                j = int(np.argmin(mags))
                if np.count_nonzero(mags == mags[j]) > 1:
                    return None
                hard[j] ^= 1
                self.ops += 1
            return hard
        return None


def _prepare(spec: PolarCodeSpec, llr: ArrayLike) -> LlrVector:
    llr = as_llrs(llr)
    if llr.size not in (spec.N, spec.transmitted_length):
        raise DomainError(f"LLR length {llr.size} does not match code length {spec.N}")
    return apply_length_match(spec, llr) if llr.size != spec.N else llr


def outcome_from_codeword(spec: PolarCodeSpec, codeword: np.ndarray, metric: float = 0.0,
                          operations: int = 0) -> DecodeOutcome:
    """Recover u from the codeword estimate, strip the CRC and check it."""
    codeword = np.asarray(codeword, dtype=np.uint8)
    u = polar_transform(codeword)
    bits = u[spec.info_mask]
    crc_ok = True
    if spec.crc is not None:
        crc_ok = crc_check(bits, spec.crc)
        bits = bits[: spec.payload_bits]
    return DecodeOutcome(message=bits, codeword=codeword, metric=metric, crc_ok=crc_ok,
                         operations=operations)


def decode_sc(spec: PolarCodeSpec, llr: ArrayLike, kernel: ScKernel = "minsum") -> DecodeOutcome:
    """Plain SC decoding over the full tree.

    Args:
        spec: Polar code.
        llr: Channel LLRs, length N or the transmitted (length-matched) length.
        kernel: f-kernel, ``"minsum"`` (default) or ``"exact"``.
    """
    alpha = _prepare(spec, llr)
    run = _ScPass(~spec.info_mask, kernel)
    beta = run.run(alpha, 0)
    return outcome_from_codeword(spec, beta, operations=run.ops)


def decode_ssc(spec: PolarCodeSpec, llr: ArrayLike,
               plan: Optional[dict[tuple[int, int], ScNodeKind]] = None) -> DecodeOutcome:
    """Simplified SC: Rate0/Rate1/Rep/Spc subtrees decoded in closed form.

    Output is bit-identical to :func:`decode_sc` with the min-sum kernel.
    """
    alpha = _prepare(spec, llr)
    frozen = ~spec.info_mask
    run = _ScPass(frozen, "minsum", plan if plan is not None else node_plan(frozen))
    beta = run.run(alpha, 0)
    return outcome_from_codeword(spec, beta, operations=run.ops)


class ScDecoder(Decoder):
    """SC decoder bound to a code; ``simplified`` switches to the node-pruning variant."""

    def __init__(self, spec: PolarCodeSpec, kernel: ScKernel = "minsum", simplified: bool = False):
        super().__init__(name="SSC" if simplified else "SC")
        if simplified and kernel != "minsum":
            raise DomainError("simplified SC is defined for the min-sum kernel only")
        self.spec = spec
        self.kernel = kernel
        self.simplified = simplified
        self._plan = node_plan(~spec.info_mask) if simplified else None

    def decode(self, llr: LlrVector) -> DecodeOutcome:
        if self.simplified:
            return decode_ssc(self.spec, llr, plan=self._plan)
        return decode_sc(self.spec, llr, kernel=self.kernel)

    def describe(self):
        return {"decoder": self.name, "kernel": self.kernel, "code": self.spec.name}
