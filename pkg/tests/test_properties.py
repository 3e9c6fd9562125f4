"""Property-based checks across modules."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from syndromehash.alist import alist_read, alist_write
from syndromehash.bits import BitVector, digest, hamming_distance
from syndromehash.decoders import Decoder, DecoderConfig
from syndromehash.entropy import dof_report, reading_flip_probability
from syndromehash.matrix import LdpcCode, SparseParityCheck, encode_systematic, syndrome

bit_lists = st.lists(st.integers(0, 1), max_size=300)


@st.composite
def matrices(draw, max_n=24):
    n = draw(st.integers(2, max_n))
    r = draw(st.integers(1, n))
    cells = draw(st.lists(st.booleans(), min_size=r * n, max_size=r * n))
    dense = np.array(cells, dtype=np.uint8).reshape(r, n)
    return SparseParityCheck.from_dense(dense)


@st.composite
def triangular_codes(draw):
    r = draw(st.integers(1, 12))
    k = draw(st.integers(1, 12))
    n = k + r
    dense = np.array(draw(st.lists(st.booleans(), min_size=r * n, max_size=r * n)), dtype=np.uint8).reshape(r, n)
    for j in range(r):
        dense[j, k + j] = 1
        dense[j, k + j + 1:] = 0
    return LdpcCode(SparseParityCheck.from_dense(dense), triangular=True)


@given(bit_lists)
def test_bitvector_round_trips(bits):
    x = BitVector.from_bits(bits)
    assert x.to_numpy().tolist() == bits
    assert BitVector.from_hex(x.hex(), len(bits)) == x
    assert BitVector.from_string("".join(map(str, bits))) == x
    assert x.weight() == sum(bits)


@given(bit_lists, st.data())
def test_xor_and_distance(bits, data):
    other = data.draw(st.lists(st.integers(0, 1), min_size=len(bits), max_size=len(bits)))
    a, b = BitVector.from_bits(bits), BitVector.from_bits(other)
    assert hamming_distance(a, b) == (a ^ b).weight() == sum(u != v for u, v in zip(bits, other))
    assert (a ^ b) ^ b == a


@given(bit_lists)
def test_digest_separates_lengths(bits):
    x = BitVector.from_bits(bits)
    assert digest(x) != digest(BitVector.from_bits(bits + [0]))
    assert len(digest(x)) == 32


@given(matrices())
def test_alist_round_trip(h):
    assert alist_read(alist_write(h)) == h


@given(matrices(), st.data())
def test_syndrome_is_linear(h, data):
    bits = st.lists(st.integers(0, 1), min_size=h.n, max_size=h.n)
    x, y = BitVector.from_bits(data.draw(bits)), BitVector.from_bits(data.draw(bits))
    assert syndrome(h, x ^ y) == syndrome(h, x) ^ syndrome(h, y)
    dense = h.to_dense().astype(np.int64)
    assert syndrome(h, x).to_numpy().tolist() == ((dense @ x.to_numpy()) % 2).tolist()


@given(triangular_codes(), st.data())
def test_encoding_gives_codewords(code, data):
    info = BitVector.from_bits(data.draw(st.lists(st.integers(0, 1), min_size=code.k, max_size=code.k)))
    c = encode_systematic(code, info)
    assert syndrome(code.h, c).weight() == 0
    assert c.to_numpy()[: code.k].tolist() == info.to_numpy().tolist()


@settings(max_examples=60, deadline=None)
@given(matrices(max_n=16), st.data(), st.sampled_from(["GallagerA", "GallagerB", "SPA"]))
def test_decoder_success_is_exact(h, data, variant):
    s = data.draw(st.lists(st.integers(0, 1), min_size=h.r, max_size=h.r))
    cfg = DecoderConfig(max_iter=20, variant=variant, channel_p=0.1 if variant == "SPA" else None)
    v, ok, _ = Decoder(h, cfg).decode_bits(np.zeros(h.n, dtype=np.uint8), np.array(s, dtype=np.uint8))
    if ok:
        assert syndrome(h, BitVector.from_bits(v)).to_numpy().tolist() == s


@given(st.lists(st.floats(0, 1), min_size=2, max_size=50).filter(lambda d: 0 < np.mean(d) < 1 and np.std(d) > 1e-6))
def test_dof_report_is_positive(d):
    rep = dof_report(d)
    assert rep.dof > 0 and rep.pair_count == len(d)


@given(st.floats(0, 0.5))
def test_flip_probability_inverts(p):
    q = reading_flip_probability(p)
    assert 0 <= q <= p + 1e-12
    assert abs(2 * q * (1 - q) - p) < 1e-9
