"""Successive-cancellation list decoding with an optional CRC selector.

All paths are processed together: node LLRs have shape (paths, M). Whenever leaves fork or
prune the list, the node returns the parent index of every surviving path so the caller can
re-align its own buffers.

Path metric: PM += |alpha| when the decision disagrees with the hard decision of alpha.
"""

import logging
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike

from ..core.decoder import DecodeOutcome, Decoder
from ..core.exceptions import DomainError
from ..core.types import LlrVector
from ..outer.crc import crc_check
from .construct import PolarCodeSpec, polar_transform
from .sc import F_KERNELS, ScKernel, _prepare, g_kernel

logger = logging.getLogger(__name__)


class _SclPass:
    def __init__(self, frozen: np.ndarray, list_size: int, kernel: ScKernel):
        self.frozen = frozen
        self.L = list_size
        self.f = F_KERNELS[kernel]
        self.pm = np.zeros(1)

    def run(self, alpha: np.ndarray, lo: int) -> tuple[np.ndarray, np.ndarray]:
        P, M = alpha.shape
        if M == 1:
            return self._leaf(alpha[:, 0], lo)
        h = M // 2
        a, b = alpha[:, :h], alpha[:, h:]
        beta_l, idx_l = self.run(self.f(a, b), lo)
        a, b = a[idx_l], b[idx_l]
        beta_r, idx_r = self.run(g_kernel(a, b, beta_l), lo + h)
        beta_l = beta_l[idx_r]
        return np.concatenate([beta_l ^ beta_r, beta_r], axis=1), idx_l[idx_r]

    def _leaf(self, alpha: np.ndarray, lo: int) -> tuple[np.ndarray, np.ndarray]:
        P = alpha.size
        mag = np.abs(alpha)
        pen0 = np.where(alpha < 0, mag, 0.0)
        if self.frozen[lo]:
            self.pm = self.pm + pen0
            return np.zeros((P, 1), dtype=np.uint8), np.arange(P)
        pen1 = np.where(alpha < 0, 0.0, mag)
        # candidate 2j + bit
        cand = np.stack([self.pm + pen0, self.pm + pen1], axis=1).reshape(-1)
        keep = min(self.L, 2 * P)
        order = np.argsort(cand, kind="stable")[:keep]
        self.pm = cand[order]
        return (order % 2).astype(np.uint8).reshape(-1, 1), order // 2


def decode_scl(spec: PolarCodeSpec, llr: ArrayLike, list_size: int,
               kernel: ScKernel = "minsum") -> DecodeOutcome:
    """CRC-aided SC list decoding.

    Args:
        spec: Polar code; when it carries a CRC the lowest-metric CRC-passing path wins.
        llr: Channel LLRs.
        list_size: Number of surviving paths L (>= 1).
        kernel: f-kernel.

    Returns:
        The selected path. Without a passing path the lowest-metric path is returned with
        ``crc_ok=False``. ``extra["path_metrics"]`` holds the final sorted list metrics.
    """
    if list_size < 1:
        raise DomainError(f"list size must be >= 1, got {list_size}")
    if kernel not in F_KERNELS:
        raise DomainError(f"unknown SC kernel {kernel!r}")
    alpha = _prepare(spec, llr)
    run = _SclPass(~spec.info_mask, list_size, kernel)
    betas, _ = run.run(alpha[None, :], 0)
    metrics = run.pm
    ranked = np.argsort(metrics, kind="stable")
    u_all = polar_transform(betas)
    info = spec.info_mask

    chosen: Optional[int] = None
    crc_ok = True
    if spec.crc is None:
        chosen = int(ranked[0])
    else:
        for j in ranked:
            if crc_check(u_all[j, info], spec.crc):
                chosen = int(j)
                break
        if chosen is None:
            chosen = int(ranked[0])
            crc_ok = False

    bits = u_all[chosen, info]
    if spec.crc is not None:
        bits = bits[: spec.payload_bits]
    return DecodeOutcome(
        message=bits,
        codeword=betas[chosen].astype(np.uint8),
        metric=float(metrics[chosen]),
        crc_ok=crc_ok,
        extra={"path_metrics": metrics[ranked].tolist()},
    )


class SclDecoder(Decoder):
    def __init__(self, spec: PolarCodeSpec, list_size: int = 8, kernel: ScKernel = "minsum"):
        prefix = "CA-SCL" if spec.crc is not None else "SCL"
        super().__init__(name=f"{prefix}-{list_size}")
        if list_size < 1:
            raise DomainError(f"list size must be >= 1, got {list_size}")
        self.spec = spec
        self.list_size = list_size
        self.kernel = kernel

    def decode(self, llr: LlrVector) -> DecodeOutcome:
        return decode_scl(self.spec, llr, self.list_size, kernel=self.kernel)

    def describe(self):
        return {"decoder": self.name, "list_size": self.list_size, "kernel": self.kernel,
                "code": self.spec.name}
