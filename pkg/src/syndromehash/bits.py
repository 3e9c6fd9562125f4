"""Packed binary vectors over GF(2).

Bit ``i`` lives in byte ``i // 8`` at bit position ``7 - (i % 8)`` (MSB first),
so packed payloads and digests are identical on every platform.
"""

from __future__ import annotations

import hashlib

import numpy as np


class BitVector:
    """Immutable length-``n`` binary vector stored packed, MSB first."""

    __slots__ = ("_length", "_payload")

    def __init__(self, length: int, payload: bytes):
        if length < 0:
            raise ValueError("length must be non-negative")
        nbytes = (length + 7) // 8
        if len(payload) != nbytes:
            raise ValueError(f"payload has {len(payload)} bytes, expected {nbytes}")
        tail = length % 8
        if tail and payload[-1] & (0xFF >> tail):
            raise ValueError("unused trailing bits must be zero")
        self._length = length
        self._payload = bytes(payload)

    @classmethod
    def from_bits(cls, bits) -> BitVector:
        arr = np.asarray(bits, dtype=np.uint8).ravel()
        if arr.size and arr.max() > 1:
            raise ValueError("bits must be 0 or 1")
        return cls(arr.size, np.packbits(arr).tobytes())

    @classmethod
    def from_string(cls, text: str) -> BitVector:
        """Parse a string of '0'/'1' characters, e.g. ``"1010"``."""
        if any(ch not in "01" for ch in text):
            raise ValueError("bit string may only contain '0' and '1'")
        return cls.from_bits([int(ch) for ch in text])

    @classmethod
    def from_hex(cls, text: str, length: int) -> BitVector:
        return cls(length, bytes.fromhex(text))

    @classmethod
    def zeros(cls, length: int) -> BitVector:
        return cls(length, bytes((length + 7) // 8))

    @classmethod
    def random(cls, length: int, rng: np.random.Generator) -> BitVector:
        return cls.from_bits(rng.integers(0, 2, size=length, dtype=np.uint8))

    @property
    def length(self) -> int:
        return self._length

    @property
    def payload(self) -> bytes:
        return self._payload

    def __len__(self) -> int:
        return self._length

    def to_numpy(self) -> np.ndarray:
        """Unpacked copy as a uint8 array of zeros and ones."""
        return np.unpackbits(np.frombuffer(self._payload, dtype=np.uint8), count=self._length)

    def hex(self) -> str:
        return self._payload.hex()

    def weight(self) -> int:
        return int(np.unpackbits(np.frombuffer(self._payload, dtype=np.uint8)).sum())

    def __xor__(self, other: BitVector) -> BitVector:
        _check_lengths(self, other)
        a = np.frombuffer(self._payload, dtype=np.uint8)
        b = np.frombuffer(other._payload, dtype=np.uint8)
        return BitVector(self._length, np.bitwise_xor(a, b).tobytes())

    def complement(self) -> BitVector:
        return BitVector.from_bits(1 - self.to_numpy())

    def __getitem__(self, i: int) -> int:
        if not -self._length <= i < self._length:
            raise IndexError("bit index out of range")
        i %= self._length
        return (self._payload[i // 8] >> (7 - i % 8)) & 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self._length == other._length and self._payload == other._payload

    def __hash__(self) -> int:
        return hash((self._length, self._payload))

    def __repr__(self) -> str:
        if self._length <= 64:
            return f"BitVector('{''.join(map(str, self.to_numpy()))}')"
        return f"BitVector(length={self._length}, weight={self.weight()})"


def _check_lengths(a: BitVector, b: BitVector) -> None:
    if a.length != b.length:
        raise ValueError(f"length mismatch: {a.length} != {b.length}")


def hamming_distance(a: BitVector, b: BitVector) -> int:
    return (a ^ b).weight()


def digest(x: BitVector) -> bytes:
    """SHA-256 over the 8-byte big-endian bit length followed by the packed bits."""
    h = hashlib.sha256()
    h.update(x.length.to_bytes(8, "big"))
    h.update(x.payload)
    return h.digest()
