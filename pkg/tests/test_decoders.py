import numpy as np
import pytest

from conftest import random_sparse
from oracles import HAMMING_H
from syndromehash.bits import BitVector
from syndromehash.decoders import (
    Decoder,
    DecoderConfig,
    Variant,
    _leave_one_out_product,
    decode_syndrome,
    decode_word,
    default_b,
    gallager_decode,
    spa_decode,
)
from syndromehash.matrix import LdpcCode, SparseParityCheck, encode_systematic, syndrome, syndrome_bits

ALL_VARIANTS = [
    DecoderConfig(variant="GallagerA", max_iter=30),
    DecoderConfig(variant="GallagerB", max_iter=30),
    DecoderConfig(variant="SPA", max_iter=30, channel_p=0.05),
]


def hamming():
    return LdpcCode(SparseParityCheck.from_dense(HAMMING_H))


def flips(n, weight, rng):
    e = np.zeros(n, dtype=np.uint8)
    e[rng.choice(n, size=weight, replace=False)] = 1
    return e


@pytest.mark.parametrize("cfg", ALL_VARIANTS, ids=lambda c: c.variant.value)
def test_zero_syndrome_is_immediate(small_code, cfg):
    res = decode_syndrome(small_code, BitVector.zeros(small_code.r), cfg)
    assert res.success and res.iterations == 0 and res.estimate.weight() == 0


@pytest.mark.parametrize("cfg", ALL_VARIANTS, ids=lambda c: c.variant.value)
def test_success_means_exact_solution(rng, cfg):
    for _ in range(300):
        n = int(rng.integers(5, 21))
        h = random_sparse(rng, n, int(rng.integers(2, n)), density=0.35)
        s = rng.integers(0, 2, h.r, dtype=np.uint8)
        dec = Decoder(h, cfg)
        v, ok, it = dec.decode_bits(np.zeros(n, dtype=np.uint8), s)
        assert 0 <= it <= cfg.max_iter
        if ok:
            assert np.array_equal(syndrome_bits(h, v), s)


@pytest.mark.parametrize("cfg", ALL_VARIANTS, ids=lambda c: c.variant.value)
def test_corrects_sparse_errors(medium_code, rng, cfg):
    dec = Decoder(medium_code, cfg)
    for _ in range(20):
        e = flips(medium_code.n, 3, rng)
        v, ok, _ = dec.decode_bits(np.zeros(medium_code.n, dtype=np.uint8), syndrome_bits(medium_code.h, e))
        assert ok and np.array_equal(v, e)


@pytest.mark.parametrize("cfg", ALL_VARIANTS, ids=lambda c: c.variant.value)
def test_codeword_and_syndrome_decoding_are_cosets(medium_code, rng, cfg):
    dec = Decoder(medium_code, cfg)
    for weight in (5, 20, 60):
        c = encode_systematic(medium_code, BitVector.random(medium_code.k, rng)).to_numpy()
        y = c ^ flips(medium_code.n, weight, rng)
        word = dec.decode(BitVector.from_bits(y))
        synd = dec.decode_syndrome(syndrome(medium_code.h, BitVector.from_bits(y)))
        assert word.success == synd.success and word.iterations == synd.iterations
        assert np.array_equal(word.estimate.to_numpy() ^ y, synd.estimate.to_numpy())


def test_codeword_decoding_recovers_codeword(medium_code, rng):
    c = encode_systematic(medium_code, BitVector.random(medium_code.k, rng)).to_numpy()
    y = c ^ flips(medium_code.n, 8, rng)
    res = spa_decode(medium_code, BitVector.from_bits(y), DecoderConfig(channel_p=0.05))
    assert res.success and np.array_equal(res.estimate.to_numpy(), c)


def test_hamming_single_errors_spa():
    code = hamming()
    table = {tuple(HAMMING_H[:, i]): i for i in range(7)}  # brute-force syndrome table
    for s, i in table.items():
        res = decode_syndrome(code, BitVector.from_bits(s), DecoderConfig(channel_p=0.12))
        assert res.success and res.estimate.to_numpy().tolist() == [int(j == i) for j in range(7)]


def test_hamming_gallager_successes_are_valid():
    code = hamming()
    for i in range(7):
        s = BitVector.from_bits(HAMMING_H[:, i])
        res = gallager_decode(code, s, DecoderConfig(variant="GallagerA"))
        if res.success:
            assert syndrome(code.h, res.estimate) == s


def test_failure_reports_max_iter(medium_code, rng):
    cfg = DecoderConfig(variant="GallagerA", max_iter=5)
    s = BitVector.from_bits(rng.integers(0, 2, medium_code.r))
    res = decode_syndrome(medium_code, s, cfg)
    assert not res.success and res.iterations == 5


def test_default_b():
    assert [default_b(dv) for dv in (3, 4, 5, 6)] == [2, 3, 4, 4]


def test_config_validation(small_code):
    with pytest.raises(ValueError):
        DecoderConfig(max_iter=0)
    with pytest.raises(ValueError):
        DecoderConfig(channel_p=0.5)
    with pytest.raises(ValueError):
        DecoderConfig(variant="BitFlip")
    with pytest.raises(ValueError):
        Decoder(small_code, DecoderConfig(variant="GallagerB", b_schedule=(3,)))  # dv=3 allows only b in [1, 2]
    with pytest.raises(ValueError):
        decode_word(small_code, BitVector.zeros(small_code.n ^ 1), DecoderConfig(variant="GallagerA"))
    with pytest.raises(ValueError):
        Decoder(small_code, DecoderConfig()).decode_bits(
            np.zeros(small_code.n, dtype=np.uint8), np.ones(small_code.r, dtype=np.uint8)
        )  # SPA without a channel estimate
    assert DecoderConfig(variant="SPA").with_channel_p(0.1).channel_p == 0.1
    assert DecoderConfig(variant="GallagerA").variant is Variant.GALLAGER_A


def test_b_schedule_last_entry_repeats(medium_code, rng):
    e = flips(medium_code.n, 10, rng)
    s = BitVector.from_bits(syndrome_bits(medium_code.h, e))
    a = decode_syndrome(medium_code, s, DecoderConfig(variant="GallagerB", b_schedule=(2, 2, 2)))
    b = decode_syndrome(medium_code, s, DecoderConfig(variant="GallagerB", b_schedule=(2,)))
    assert a == b


def test_leave_one_out_product(rng):
    t = rng.uniform(-1, 1, (50, 6))
    t[3, 2] = 0.0
    t[7, [1, 4]] = 0.0
    out = _leave_one_out_product(t)
    for i in range(50):
        for j in range(6):
            assert out[i, j] == pytest.approx(np.prod(np.delete(t[i], j)), abs=1e-15)
    assert np.array_equal(_leave_one_out_product(np.full((3, 1), 0.5)), np.ones((3, 1)))


def test_variant_a_equals_b2_for_dv3(medium_code, rng):
    # with dv=3, "all dv-1 others disagree" and "at least 2 disagree" are the same rule
    a = Decoder(medium_code, DecoderConfig(variant="GallagerA", max_iter=20))
    b = Decoder(medium_code, DecoderConfig(variant="GallagerB", b_schedule=(2,), max_iter=20))
    zeros = np.zeros(medium_code.n, dtype=np.uint8)
    for _ in range(1000):
        s = syndrome_bits(medium_code.h, (rng.random(medium_code.n) < 0.03).astype(np.uint8))
        va, oka, ita = a.decode_bits(zeros, s)
        vb, okb, itb = b.decode_bits(zeros, s)
        assert oka == okb and ita == itb and np.array_equal(va, vb)
