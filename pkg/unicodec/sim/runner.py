"""Monte-Carlo simulation loop.

Frames of one SNR point are simulated in rounds. A round hands one batch to every worker;
batch ``b`` of worker ``w`` draws messages and noise from ``point_seed.generator(w, b)``,
so results depend only on (seed, workers, batch_frames) and not on scheduling.
"""

import logging
import time
from collections import Counter
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from tqdm import tqdm

from ..core.channel import transmit_bpsk_awgn
from ..core.config import Config
from ..core.exceptions import ConfigError, SimulationError, UnicodecException
from ..core.types import ChannelSpec, SeedSpec
from ..ldpc.decoder import count_bit_errors
from .config import ExperimentConfig, SchemeDescriptor
from .registry import global_registry
from .result import PointResult, SimResult
from .schemes import Codec, zero_payload

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class _Batch:
    descriptor: str
    ebn0_db: float
    seed: SeedSpec
    worker: int
    index: int
    frames: int
    all_zero: bool


@dataclass
class _Counts:
    frames: int = 0
    frame_errors: int = 0
    bit_errors: int = 0
    iterations: Counter = field(default_factory=Counter)


@lru_cache(maxsize=8)
def _codec(descriptor: str) -> Codec:
    # keyed by the descriptor JSON so each worker process builds a code once
    return global_registry.resolve(SchemeDescriptor.model_validate_json(descriptor))


def resolve_all_zero(descriptor: SchemeDescriptor, codec: Codec) -> bool:
    """Transmission mode: the descriptor's ``all_zero`` if set, else the scheme default."""
    if descriptor.all_zero is None:
        if codec.encode is None and not codec.symmetric:
            raise ConfigError(f"scheme '{descriptor.family}' can neither encode nor send the all-zero codeword")
        return codec.symmetric
    if descriptor.all_zero and not codec.symmetric:
        raise ConfigError(f"scheme '{descriptor.family}' is not declared symmetric; all-zero transmission refused")
    if not descriptor.all_zero and codec.encode is None:
        raise ConfigError(f"scheme '{descriptor.family}' has no encoder; only all-zero transmission is supported")
    return descriptor.all_zero


def _run_batch(batch: _Batch) -> _Counts:
    codec = _codec(batch.descriptor)
    rng = batch.seed.generator(batch.worker, batch.index)
    channel = ChannelSpec(ebn0_db=batch.ebn0_db, code_rate=codec.rate)
    counts = _Counts()
    if batch.all_zero:
        message, transmitted = zero_payload(codec)
    for _ in range(batch.frames):
        if not batch.all_zero:
            message = rng.integers(0, 2, codec.payload_bits, dtype=np.uint8)
            transmitted = codec.encode(message)
        llr = transmit_bpsk_awgn(transmitted, channel, batch.seed, rng=rng)
        outcome = codec.decoder.decode(llr)
        failed, errors = count_bit_errors(outcome.message, message)
        counts.frames += 1
        counts.frame_errors += int(failed)
        counts.bit_errors += errors
        if outcome.iterations is not None:
            counts.iterations[outcome.iterations] += 1
    return counts


def _simulate_point(cfg: ExperimentConfig, codec: Codec, index: int, ebn0_db: float, all_zero: bool,
                    workers: int, pool: Optional[Executor], progress: bool) -> PointResult:
    stop = cfg.stop
    point_seed = cfg.seed.child(index)
    descriptor = cfg.scheme.model_dump_json()
    total = _Counts()
    start = time.perf_counter()
    termination = None
    round_index = 0

    bar = tqdm(total=stop.min_frame_errors, unit="fe", desc=f"{codec.label} @ {ebn0_db:.2f} dB",
               leave=False, disable=not progress)
    try:
        while True:
            if total.frame_errors >= stop.min_frame_errors:
                termination = "min_frame_errors"
                break
            remaining = stop.max_frames - total.frames
            if remaining <= 0:
                termination = "max_frames"
                break
            if stop.max_wall_seconds is not None and time.perf_counter() - start >= stop.max_wall_seconds:
                termination = "max_wall_seconds"
                break

            batches = []
            for w in range(workers):
                n = min(cfg.batch_frames, remaining)
                if n <= 0:
                    break
                remaining -= n
                batches.append(_Batch(descriptor, ebn0_db, point_seed, w, round_index, n, all_zero))
            try:
                results = list(pool.map(_run_batch, batches)) if pool else [_run_batch(b) for b in batches]
            except UnicodecException as exc:
                raise SimulationError(f"{codec.label} @ {ebn0_db} dB: {exc}") from exc

            # fixed worker order keeps the aggregate reproducible
            before = total.frame_errors
            for counts in results:
                total.frames += counts.frames
                total.frame_errors += counts.frame_errors
                total.bit_errors += counts.bit_errors
                total.iterations.update(counts.iterations)
            bar.update(min(total.frame_errors, stop.min_frame_errors) - min(before, stop.min_frame_errors))
            round_index += 1
    finally:
        bar.close()

    point = PointResult.from_counts(
        ebn0_db=ebn0_db,
        frames=total.frames,
        frame_errors=total.frame_errors,
        bit_errors=total.bit_errors,
        payload_bits=codec.payload_bits,
        seconds=round(time.perf_counter() - start, 3),
        termination=termination,
        iterations=dict(total.iterations),
    )
    logger.info("%s @ %.2f dB: %d errors / %d frames, FER %.3e, BER %.3e (%s)", codec.label, ebn0_db,
                point.frame_errors, point.frames, point.fer, point.ber or 0.0, termination)
    return point


def run_experiment(cfg: ExperimentConfig, config: Optional[Config] = None,
                   progress: Optional[bool] = None) -> SimResult:
    """Simulate every SNR point of an experiment.

    Args:
        cfg: The experiment.
        config: Runtime settings; supplies the worker count when the experiment does not set one.
        progress: Show progress bars. Defaults to ``config.progress``.

    Raises:
        ConfigError: The scheme cannot be resolved or its transmission mode is invalid.
        SimulationError: Decoding failed mid-run.
    """
    config = config or Config()
    progress = config.progress if progress is None else progress
    workers = cfg.workers if "workers" in cfg.model_fields_set else config.workers

    descriptor = cfg.scheme.model_dump_json()
    codec = _codec(descriptor)
    all_zero = resolve_all_zero(cfg.scheme, codec)
    logger.info("%s: %s, %d SNR points, %d worker(s), %s", cfg.name, codec.label, len(cfg.snr_points),
                workers, "all-zero codeword" if all_zero else "random messages")

    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        points = [_simulate_point(cfg, codec, i, ebn0, all_zero, workers, pool, progress)
                  for i, ebn0 in enumerate(cfg.snr_points)]
    finally:
        if pool is not None:
            pool.shutdown()

    return SimResult(
        scheme=codec.label,
        family=cfg.scheme.family,
        payload_bits=codec.payload_bits,
        code_length=codec.code_length,
        rate=codec.rate,
        points=points,
        config={**cfg.model_dump(mode="json"), "workers": workers, "decoder": codec.decoder.describe()},
    )
