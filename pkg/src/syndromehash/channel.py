"""Binary symmetric channel and Monte Carlo BER/FER estimation.

Every frame draws its randomness from ``SeedSequence(master_seed,
spawn_key=(point, frame))``, so a report depends only on its inputs and not on
how frames are split across worker processes. Early stopping truncates at the
frame that produced the ``min_frame_errors``-th error, which is likewise
independent of batching.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .alist import code_id
from .bits import BitVector
from .decoders import Decoder, DecoderConfig, Variant
from .matrix import LdpcCode, encode_systematic_bits

CSV_COLUMNS = ("p", "frames", "bit_errors", "frame_errors", "ber", "fer", "avg_iters", "ci_low", "ci_high")
DEFAULT_MIN_FRAME_ERRORS = 30
_P_FLOOR = 1e-6  # matched SPA needs a design crossover strictly inside (0, 0.5)


@dataclass(frozen=True)
class BscChannel:
    p: float

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise ValueError(f"crossover probability must lie in [0, 1], got {self.p}")


def frame_rng(master_seed: int, point: int, frame: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(point, frame)))


def bsc_apply(x: BitVector, channel: BscChannel, seed) -> BitVector:
    """Flip each bit independently with probability ``channel.p``."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    flips = (rng.random(x.length) < channel.p).astype(np.uint8)
    return BitVector.from_bits(x.to_numpy() ^ flips)


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if trials <= 0:
        return 0.0, 1.0
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


@dataclass(frozen=True)
class PointStats:
    p: float
    frames: int
    bit_errors: int
    frame_errors: int
    iterations: int
    n: int

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.frames * self.n)

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames

    @property
    def avg_iters(self) -> float:
        return self.iterations / self.frames

    @property
    def ci(self) -> tuple[float, float]:
        return wilson_interval(self.frame_errors, self.frames)


@dataclass(frozen=True)
class SimulationReport:
    points: tuple[PointStats, ...]
    metadata: dict = field(default_factory=dict)

    def to_csv(self, extra_header: Optional[dict] = None) -> str:
        out = io.StringIO()
        for key, value in {**(extra_header or {}), **self.metadata}.items():
            out.write(f"# {key}: {value}\n")
        out.write(",".join(CSV_COLUMNS) + "\n")
        for pt in self.points:
            lo, hi = pt.ci
            row = (pt.p, pt.frames, pt.bit_errors, pt.frame_errors, pt.ber, pt.fer, pt.avg_iters, lo, hi)
            out.write(",".join(_fmt(v) for v in row) + "\n")
        return out.getvalue()


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _design_config(cfg: DecoderConfig, p: float) -> DecoderConfig:
    if cfg.variant is not Variant.SPA or cfg.channel_p is not None:
        return cfg
    return cfg.with_channel_p(min(max(p, _P_FLOOR), 0.5 - _P_FLOOR))


def _run_frames(code: LdpcCode, cfg: DecoderConfig, p: float, point: int, frames: Sequence[int],
                master_seed: int, random_codewords: bool) -> np.ndarray:
    """Rows of (bit_errors, frame_error, iterations) for the given frame indices."""
    dec = Decoder(code, _design_config(cfg, p))
    n, k = code.n, code.k
    zeros_r = np.zeros(code.r, dtype=np.uint8)
    out = np.zeros((len(frames), 3), dtype=np.int64)
    for t, f in enumerate(frames):
        rng = frame_rng(master_seed, point, f)
        if random_codewords:
            c = encode_systematic_bits(code, rng.integers(0, 2, size=k, dtype=np.uint8))
        else:
            c = np.zeros(n, dtype=np.uint8)
        y = c ^ (rng.random(n) < p).astype(np.uint8)
        est, _, iters = dec.decode_bits(y, zeros_r)
        bit_errors = int(np.count_nonzero(est != c))
        out[t] = (bit_errors, bit_errors > 0, iters)
    return out


def _worker(args):
    return _run_frames(*args)


def run_montecarlo(
    code: LdpcCode,
    cfg: DecoderConfig,
    p_grid: Sequence[float],
    frames: int,
    master_seed: int,
    min_frame_errors: Optional[int] = None,
    workers: int = 1,
    random_codewords: bool = False,
    batch: int = 64,
) -> SimulationReport:
    """Estimate BER and FER at each crossover probability in ``p_grid``.

    For SPA with ``cfg.channel_p`` unset the decoder is matched to each point's
    ``p``. ``workers`` never changes the numbers, only the wall time.
    """
    if len(p_grid) == 0:
        raise ValueError("p_grid is empty")
    if frames < 1:
        raise ValueError("frames must be at least 1")
    if min_frame_errors is not None and min_frame_errors < 1:
        raise ValueError("min_frame_errors must be at least 1")
    if random_codewords and not code.triangular:
        raise ValueError("random-codeword mode needs a lower-triangular code")
    for p in p_grid:
        BscChannel(p)

    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    points = []
    try:
        for point, p in enumerate(p_grid):
            rows = []
            errors = 0
            start = 0
            while start < frames:
                # with a pool, dispatch one batch per worker per round
                step = batch * (workers if pool else 1)
                idx = list(range(start, min(start + step, frames)))
                chunks = [idx[i:i + batch] for i in range(0, len(idx), batch)]
                jobs = [(code, cfg, float(p), point, ch, master_seed, random_codewords) for ch in chunks]
                results = list(pool.map(_worker, jobs)) if pool else [_worker(j) for j in jobs]
                block = np.concatenate(results)
                rows.append(block)
                errors += int(block[:, 1].sum())
                start = idx[-1] + 1
                if min_frame_errors is not None and errors >= min_frame_errors:
                    break
            data = np.concatenate(rows)
            if min_frame_errors is not None:
                hits = np.nonzero(np.cumsum(data[:, 1]) >= min_frame_errors)[0]
                if hits.size:
                    data = data[: hits[0] + 1]
            points.append(PointStats(
                float(p), len(data), int(data[:, 0].sum()), int(data[:, 1].sum()), int(data[:, 2].sum()), code.n,
            ))
    finally:
        if pool:
            pool.shutdown()

    meta = {
        "code_id": code_id(code.h),
        "n": code.n,
        "k": code.k,
        "decoder": cfg.variant.value,
        "max_iter": cfg.max_iter,
        "channel_p": "matched" if cfg.channel_p is None else cfg.channel_p,
        "codewords": "random" if random_codewords else "all-zero",
        "master_seed": master_seed,
        "min_frame_errors": "off" if min_frame_errors is None else min_frame_errors,
    }
    if cfg.variant is Variant.GALLAGER_B:
        meta["b_schedule"] = "default" if cfg.b_schedule is None else " ".join(map(str, cfg.b_schedule))
    return SimulationReport(tuple(points), meta)
