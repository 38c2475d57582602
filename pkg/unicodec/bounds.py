"""Finite-blocklength reference curves for the Bi-AWGN channel (normal approximation).

The information density of BPSK over AWGN, conditioned on the +1 symbol, is
``i(y) = 1 - log2(1 + exp(-2 y / sigma^2))`` with ``y = 1 + sigma z``. Capacity and dispersion
are its mean and variance, taken with Gauss-Hermite quadrature.
"""

import logging
import math
from functools import lru_cache
from typing import Sequence

import numpy as np
from numpy.polynomial.hermite import hermgauss
from pydantic import BaseModel, ConfigDict
from scipy.optimize import brentq
from scipy.special import log_ndtr

from .core.channel import ebn0_to_sigma
from .core.exceptions import DomainError

logger = logging.getLogger(__name__)

QUADRATURE_NODES = 128
_LN2 = math.log(2.0)
# smallest value reported for a bound so that log-scale plots stay finite
FER_FLOOR = 1e-300


class BoundPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    ebn0_db: float
    n: int
    k: int
    fer_bound: float


@lru_cache(maxsize=1)
def _hermite(nodes: int = QUADRATURE_NODES) -> tuple[np.ndarray, np.ndarray]:
    x, w = hermgauss(nodes)
    # E[f(Z)] for Z ~ N(0, 1) is sum(w' f(z'))
    return math.sqrt(2.0) * x, w / math.sqrt(math.pi)


def capacity_dispersion_biawgn(sigma: float) -> tuple[float, float]:
    """Capacity (bits) and dispersion (bits^2) of BPSK over real AWGN with noise std ``sigma``."""
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    z, w = _hermite()
    y = 1.0 + sigma * z
    density = 1.0 - np.logaddexp(0.0, -2.0 * y / sigma**2) / _LN2
    C = float(np.dot(w, density))
    V = float(np.dot(w, (density - C) ** 2))
    return C, max(V, 0.0)


def _check_nk(n: int, k: int) -> None:
    if n < 1:
        raise DomainError(f"blocklength must be >= 1, got {n}")
    if not 0 < k < n:
        raise DomainError(f"need 0 < k < n, got k={k}, n={n}")


def _log_fer(n: int, k: int, ebn0_db: float) -> float:
    C, V = capacity_dispersion_biawgn(ebn0_to_sigma(ebn0_db, k / n))
    margin = n * C - k + 0.5 * math.log2(n)
    if V <= 0.0:
        return 0.0 if margin <= 0 else math.log(FER_FLOOR)
    return float(log_ndtr(-margin / math.sqrt(n * V)))


def normal_approx_fer(n: int, k: int, ebn0_db: float) -> float:
    """Normal-approximation error probability of the best (n, k) code at the given Eb/N0.

    eps = Q((n C - k + log2(n) / 2) / sqrt(n V)), clamped to (0, 1).
    """
    _check_nk(n, k)
    eps = math.exp(_log_fer(n, k, ebn0_db))
    return min(max(eps, FER_FLOOR), 1.0 - 1e-16)


def bound_curve(n: int, k: int, ebn0_grid: Sequence[float]) -> list[BoundPoint]:
    _check_nk(n, k)
    return [BoundPoint(ebn0_db=float(x), n=n, k=k, fer_bound=normal_approx_fer(n, k, float(x)))
            for x in ebn0_grid]


def ebn0_at_fer(n: int, k: int, fer: float, lo: float = -3.0, hi: float = 15.0) -> float:
    """Eb/N0 (dB) at which the bound reaches ``fer``; used for horizontal-dB comparisons."""
    _check_nk(n, k)
    if not 0.0 < fer < 1.0:
        raise DomainError(f"target FER must lie in (0, 1), got {fer}")
    target = math.log(fer)
    return float(brentq(lambda x: _log_fer(n, k, x) - target, lo, hi, xtol=1e-6))


def bound_result(n: int, k: int, ebn0_grid: Sequence[float], name: str = ""):
    """Bound curve as a ``SimResult`` with ``kind="bound"``, ready for CSV/JSON export and plotting."""
    from .sim.result import PointResult, SimResult

    points = [PointResult(ebn0_db=p.ebn0_db, fer=p.fer_bound, termination="bound")
              for p in bound_curve(n, k, ebn0_grid)]
    return SimResult(scheme=name or f"NA bound ({n},{k})", kind="bound", payload_bits=k,
                     code_length=n, rate=k / n, points=points)
