"""Hard-decision (Gallager A/B) and sum-product decoding over the BSC.

Every decoder runs on a constraint system ``H v = t``. Codeword decoding uses
``t = 0`` with the received word as prior. Syndrome decoding uses ``t = s``
with the all-zero word as prior. The two are coset-equivalent: decoding
``y = c + e`` and decoding the syndrome ``H e`` give estimates that differ by
exactly ``y``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .bits import BitVector
from .matrix import LdpcCode, SparseParityCheck, syndrome_bits

LLR_CLAMP = 30.0
_TANH_LIMIT = math.tanh(LLR_CLAMP / 2)


class Variant(str, enum.Enum):
    GALLAGER_A = "GallagerA"
    GALLAGER_B = "GallagerB"
    SPA = "SPA"


@dataclass(frozen=True)
class DecoderConfig:
    max_iter: int = 100
    variant: Variant = Variant.SPA
    b_schedule: Optional[tuple[int, ...]] = None  # per-iteration flip thresholds; the last one repeats
    channel_p: Optional[float] = None  # SPA design crossover probability

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.b_schedule is not None:
            object.__setattr__(self, "b_schedule", tuple(int(b) for b in self.b_schedule))
        if self.channel_p is not None and not 0 < self.channel_p < 0.5:
            raise ValueError("channel_p must lie in (0, 0.5)")

    def with_channel_p(self, p: float) -> DecoderConfig:
        return DecoderConfig(self.max_iter, self.variant, self.b_schedule, p)


@dataclass(frozen=True)
class DecodeResult:
    success: bool
    estimate: BitVector
    iterations: int


def default_b(dv: int) -> int:
    return min(math.ceil(dv / 2) + 1, dv - 1)


def _check_schedule(schedule: Sequence[int], dv: int) -> None:
    if len(schedule) == 0:
        raise ValueError("b_schedule must not be empty")
    lo = math.ceil((dv - 1) / 2)
    for b in schedule:
        if not max(lo, 1) <= b <= dv - 1:
            raise ValueError(f"b threshold {b} outside [{max(lo, 1)}, {dv - 1}] for column weight {dv}")


class Decoder:
    """Message-passing decoder bound to one code.

    Holds only precomputed, read-only graph indices; working arrays are
    allocated per call, so one instance is safe to reuse sequentially.
    """

    def __init__(self, code: LdpcCode | SparseParityCheck, cfg: DecoderConfig = DecoderConfig()):
        self.h = code.h if isinstance(code, LdpcCode) else code
        self.cfg = cfg
        h = self.h
        self._e_var = h.row_idx.astype(np.int64)
        self._e_chk = h.edge_rows.astype(np.int64)
        self._deg = h.col_weights()
        self._deg_e = self._deg[self._e_var]
        if cfg.variant is Variant.GALLAGER_B:
            dv = int(self._deg.max())
            schedule = cfg.b_schedule if cfg.b_schedule is not None else (max(default_b(dv), 1),)
            if dv > 1:  # weight-1 columns never flip, so any threshold is moot
                _check_schedule(schedule, dv)
            self._schedule = schedule
        elif cfg.variant is Variant.GALLAGER_A:
            self._schedule = None

    # public entry points -------------------------------------------------

    def decode(self, y: BitVector) -> DecodeResult:
        """Codeword decoding of a received word ``y``."""
        if y.length != self.h.n:
            raise ValueError(f"received word length {y.length} != n={self.h.n}")
        bits, ok, it = self.decode_bits(y.to_numpy(), np.zeros(self.h.r, dtype=np.uint8))
        return DecodeResult(ok, BitVector.from_bits(bits), it)

    def decode_syndrome(self, s: BitVector) -> DecodeResult:
        """Find a low-weight ``v`` with ``H v = s``."""
        if s.length != self.h.r:
            raise ValueError(f"syndrome length {s.length} != r={self.h.r}")
        bits, ok, it = self.decode_bits(np.zeros(self.h.n, dtype=np.uint8), s.to_numpy())
        return DecodeResult(ok, BitVector.from_bits(bits), it)

    def decode_bits(self, prior: np.ndarray, target: np.ndarray) -> tuple[np.ndarray, bool, int]:
        """Solve ``H v = target`` starting from hard prior bits; returns (v, success, iterations)."""
        prior = np.asarray(prior, dtype=np.uint8)
        target = np.asarray(target, dtype=np.uint8)
        if np.array_equal(syndrome_bits(self.h, prior), target):
            return prior.copy(), True, 0
        if self.cfg.variant is Variant.SPA:
            return self._spa(prior, target)
        return self._gallager(prior, target)

    # sum-product -----------------------------------------------------------

    def _spa(self, prior, target):
        p = self.cfg.channel_p
        if p is None:
            raise ValueError("SPA decoding needs cfg.channel_p")
        h = self.h
        e_var = self._e_var
        mag = math.log((1 - p) / p)
        llr = mag * (1.0 - 2.0 * prior)
        check_sign = (1.0 - 2.0 * target)[self._e_chk]
        m_vc = llr[e_var]
        loo = np.empty_like(m_vc)
        for it in range(1, self.cfg.max_iter + 1):
            t = np.tanh(0.5 * m_vc)
            for d, idx in h.row_groups:
                loo[idx] = _leave_one_out_product(t[idx])
            np.clip(loo, -_TANH_LIMIT, _TANH_LIMIT, out=loo)
            m_cv = 2.0 * np.arctanh(loo) * check_sign
            total = llr + np.bincount(e_var, weights=m_cv, minlength=h.n)
            hard = np.where(total == 0.0, prior, total < 0).astype(np.uint8)
            if np.array_equal(syndrome_bits(h, hard), target):
                return hard, True, it
            m_vc = np.clip(total[e_var] - m_cv, -LLR_CLAMP, LLR_CLAMP)
        return hard, False, self.cfg.max_iter

    # Gallager A / B --------------------------------------------------------

    def _gallager(self, prior, target):
        h = self.h
        e_var, e_chk, deg, deg_e = self._e_var, self._e_chk, self._deg, self._deg_e
        prior_e = prior[e_var].astype(np.int64)
        target_e = target[e_chk].astype(np.int64)
        m_vc = prior_e.copy()
        for it in range(1, self.cfg.max_iter + 1):
            row_par = np.bincount(e_chk, weights=m_vc, minlength=h.r).astype(np.int64) & 1
            # check's opinion of each bit: parity target minus the other bits
            m_cv = row_par[e_chk] ^ m_vc ^ target_e
            disagree = m_cv ^ prior_e
            count = np.bincount(e_var, weights=disagree, minlength=h.n).astype(np.int64)
            extrinsic = count[e_var] - disagree
            if self._schedule is None:
                b_e = deg_e - 1
                b_v = deg
            else:
                b = self._schedule[min(it - 1, len(self._schedule) - 1)]
                b_e = np.minimum(b, deg_e - 1)
                b_v = np.minimum(b, deg - 1) + 1
            flip = (deg_e > 1) & (extrinsic >= b_e)
            m_vc = prior_e ^ flip
            # the decision is the outgoing rule applied to all dv messages: one more vote needed
            hard = (prior ^ (count >= b_v)).astype(np.uint8)
            if np.array_equal(syndrome_bits(h, hard), target):
                return hard, True, it
        return hard, False, self.cfg.max_iter


def _leave_one_out_product(t: np.ndarray) -> np.ndarray:
    """For each row of ``t``, the product of all other entries (exact with zeros)."""
    m, d = t.shape
    if d == 1:
        return np.ones_like(t)
    prefix = np.ones_like(t)
    suffix = np.ones_like(t)
    np.cumprod(t[:, :-1], axis=1, out=prefix[:, 1:])
    np.cumprod(t[:, :0:-1], axis=1, out=suffix[:, -2::-1])
    return prefix * suffix


def gallager_decode(code: LdpcCode, s: BitVector, cfg: DecoderConfig) -> DecodeResult:
    """Syndrome decoding with Gallager A or B."""
    if cfg.variant is Variant.SPA:
        raise ValueError("gallager_decode needs variant GallagerA or GallagerB")
    return Decoder(code, cfg).decode_syndrome(s)


def gallager_decode_word(code: LdpcCode, y: BitVector, cfg: DecoderConfig) -> DecodeResult:
    if cfg.variant is Variant.SPA:
        raise ValueError("gallager_decode_word needs variant GallagerA or GallagerB")
    return Decoder(code, cfg).decode(y)


def spa_decode(code: LdpcCode, y: BitVector, cfg: DecoderConfig) -> DecodeResult:
    return Decoder(code, _as_spa(cfg)).decode(y)


def spa_syndrome_decode(code: LdpcCode, s: BitVector, cfg: DecoderConfig) -> DecodeResult:
    return Decoder(code, _as_spa(cfg)).decode_syndrome(s)


def _as_spa(cfg: DecoderConfig) -> DecoderConfig:
    if cfg.variant is not Variant.SPA:
        return DecoderConfig(cfg.max_iter, Variant.SPA, None, cfg.channel_p)
    return cfg


def decode_word(code: LdpcCode, y: BitVector, cfg: DecoderConfig) -> DecodeResult:
    """Codeword decoding with whichever variant ``cfg`` names."""
    return Decoder(code, cfg).decode(y)


def decode_syndrome(code: LdpcCode, s: BitVector, cfg: DecoderConfig) -> DecodeResult:
    return Decoder(code, cfg).decode_syndrome(s)
