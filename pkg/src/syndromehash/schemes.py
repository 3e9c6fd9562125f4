"""Syndrome fuzzy hashing and fuzzy commitment: enrollment, verification, records.

Both schemes store a SHA-256 digest plus one bit vector. Syndrome hashing keeps
``(H_a(x), Hx)``; fuzzy commitment keeps ``(H_a(c), x + c)`` for a random
codeword ``c``. Access is granted only when the decoder reports success and the
digest of the reconstructed value matches, so a decoder that lands on the
wrong coset member is still rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .alist import code_id
from .bits import BitVector, digest
from .decoders import Decoder, DecoderConfig
from .matrix import LdpcCode, encode_systematic, syndrome

SYNDROME_HASH = "syndrome-fuzzy-hash"
COMMITMENT = "fuzzy-commitment"
HASH_ALG = "SHA-256"
RECORD_VERSION = 1


class SchemeError(ValueError):
    """Record does not fit the scheme or code it is used with."""


@dataclass(frozen=True)
class CodeRef:
    id: str
    n: int
    r: int

    @classmethod
    def of(cls, code: LdpcCode) -> CodeRef:
        return cls(code_id(code.h), code.n, code.r)


@dataclass(frozen=True)
class EnrollmentRecord:
    scheme: str
    code_ref: CodeRef
    digest: bytes
    payload: BitVector
    hash_alg: str = HASH_ALG

    def __post_init__(self):
        if self.scheme not in (SYNDROME_HASH, COMMITMENT):
            raise SchemeError(f"unknown scheme {self.scheme!r}")
        if self.hash_alg != HASH_ALG:
            raise SchemeError(f"unsupported hash_alg {self.hash_alg!r}")
        if len(self.digest) != 32:
            raise SchemeError("digest must be 256 bits")
        want = self.code_ref.r if self.scheme == SYNDROME_HASH else self.code_ref.n
        if self.payload.length != want:
            raise SchemeError(f"{self.scheme} payload must have {want} bits, got {self.payload.length}")

    def to_dict(self) -> dict:
        return {
            "version": RECORD_VERSION,
            "scheme": self.scheme,
            "code_ref": {"id": self.code_ref.id, "n": self.code_ref.n, "r": self.code_ref.r},
            "hash_alg": self.hash_alg,
            "digest_hex": self.digest.hex(),
            "payload_hex": self.payload.hex(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, obj: dict) -> EnrollmentRecord:
        try:
            if obj["version"] != RECORD_VERSION:
                raise SchemeError(f"unsupported record version {obj['version']!r}")
            ref = obj["code_ref"]
            code_ref = CodeRef(str(ref["id"]), int(ref["n"]), int(ref["r"]))
            scheme = obj["scheme"]
            length = code_ref.r if scheme == SYNDROME_HASH else code_ref.n
            payload = BitVector.from_hex(obj["payload_hex"], length)
            dig = bytes.fromhex(obj["digest_hex"])
            return cls(scheme, code_ref, dig, payload, obj["hash_alg"])
        except SchemeError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemeError(f"malformed enrollment record: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> EnrollmentRecord:
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemeError(f"malformed enrollment record: {exc}") from exc
        if not isinstance(obj, dict):
            raise SchemeError("malformed enrollment record: not an object")
        return cls.from_dict(obj)


@dataclass(frozen=True)
class VerifyOutcome:
    granted: bool
    recovered: Optional[BitVector]
    decoder_iterations: int


def _check_length(code: LdpcCode, x: BitVector, what: str) -> None:
    if x.length != code.n:
        raise ValueError(f"{what} length {x.length} != n={code.n}")


def _check_record(code: LdpcCode, record: EnrollmentRecord, scheme: str) -> None:
    if record.scheme != scheme:
        raise SchemeError(f"record scheme is {record.scheme!r}, expected {scheme!r}")
    ref = CodeRef.of(code)
    if ref != record.code_ref:
        raise SchemeError(f"record was enrolled with code {record.code_ref.id}, not {ref.id}")


def fh_enroll(code: LdpcCode, x: BitVector) -> EnrollmentRecord:
    _check_length(code, x, "template")
    return EnrollmentRecord(SYNDROME_HASH, CodeRef.of(code), digest(x), syndrome(code.h, x))


def fh_verify(code: LdpcCode, record: EnrollmentRecord, y: BitVector, cfg: DecoderConfig) -> VerifyOutcome:
    _check_record(code, record, SYNDROME_HASH)
    _check_length(code, y, "probe")
    s = record.payload ^ syndrome(code.h, y)
    res = Decoder(code, cfg).decode_syndrome(s)
    if not res.success:
        return VerifyOutcome(False, None, res.iterations)
    candidate = res.estimate ^ y
    if digest(candidate) != record.digest:
        return VerifyOutcome(False, None, res.iterations)
    return VerifyOutcome(True, candidate, res.iterations)


def commitment_codeword(code: LdpcCode, seed) -> BitVector:
    """The random codeword ``fc_enroll`` draws for ``seed``."""
    if not code.triangular:
        raise ValueError("fuzzy commitment needs a lower-triangular code for encoding")
    info = np.random.default_rng(seed).integers(0, 2, size=code.k, dtype=np.uint8)
    return encode_systematic(code, BitVector.from_bits(info))


def fc_enroll(code: LdpcCode, x: BitVector, seed) -> EnrollmentRecord:
    _check_length(code, x, "template")
    c = commitment_codeword(code, seed)
    return EnrollmentRecord(COMMITMENT, CodeRef.of(code), digest(c), x ^ c)


def fc_verify(code: LdpcCode, record: EnrollmentRecord, y: BitVector, cfg: DecoderConfig) -> VerifyOutcome:
    _check_record(code, record, COMMITMENT)
    _check_length(code, y, "probe")
    z = y ^ record.payload
    res = Decoder(code, cfg).decode(z)
    if not res.success or digest(res.estimate) != record.digest:
        return VerifyOutcome(False, None, res.iterations)
    return VerifyOutcome(True, res.estimate ^ record.payload, res.iterations)


def enroll(code: LdpcCode, x: BitVector, scheme: str = SYNDROME_HASH, seed=None) -> EnrollmentRecord:
    if scheme == SYNDROME_HASH:
        return fh_enroll(code, x)
    if scheme == COMMITMENT:
        if seed is None:
            raise ValueError("fuzzy commitment enrollment needs a seed")
        return fc_enroll(code, x, seed)
    raise SchemeError(f"unknown scheme {scheme!r}")


def verify(code: LdpcCode, record: EnrollmentRecord, y: BitVector, cfg: DecoderConfig) -> VerifyOutcome:
    """Dispatch on the record's scheme tag."""
    if record.scheme == SYNDROME_HASH:
        return fh_verify(code, record, y, cfg)
    return fc_verify(code, record, y, cfg)
