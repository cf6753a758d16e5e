from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from oracles import pair_closed
from qadmit.cantor import (HorizonExceeded, MalformedDelimitedWord, Stream, bin_to_nat, cantor_distance,
                           common_prefix_length, delimit, format_dyadic, iter_words, nat_to_bin, pair,
                           parse_dyadic, phi_distance, round_half_toward_zero, split_delimited, undelimit,
                           unpair)
from qadmit.moduli import poly

words = st.text(alphabet="01", max_size=24)


def test_pair_values():
    assert pair(1, 0) == pair_closed(1, 0) == 2
    assert pair(0, 1) == pair_closed(0, 1) == 1


def test_pair_roundtrip_exhaustive():
    seen = set()
    for n, m in product(range(101), repeat=2):
        k = pair(n, m)
        assert unpair(k) == (n, m)
        seen.add(k)
    assert len(seen) == 101 * 101


@given(st.integers(0, 10 ** 12))
def test_unpair_inverts(k):
    assert pair(*unpair(k)) == k


def test_delimit_example():
    assert delimit("1") == "011"
    assert delimit("") == "1"


def test_delimit_roundtrip_exhaustive():
    for L in range(11):
        for w in iter_words(L):
            assert undelimit(delimit(w)) == (w, 2 * L + 1)


def test_split_delimited_keeps_tail():
    blocks, tail = split_delimited(delimit("10") + delimit("") + "00")
    assert blocks == ["10", ""] and tail == "00"


def test_undelimit_truncated():
    with pytest.raises(MalformedDelimitedWord):
        undelimit("0100")


def test_nat_to_bin_values():
    assert nat_to_bin(0) == ""
    assert nat_to_bin(1) == "0"
    assert nat_to_bin(2) == "1"
    assert nat_to_bin(3) == "00"


def test_bin_roundtrip():
    for a in range(10_001):
        assert bin_to_nat(nat_to_bin(a)) == a


@given(words)
def test_bin_is_bijective(w):
    assert nat_to_bin(bin_to_nat(w)) == w


def test_round_half_toward_zero():
    assert round_half_toward_zero(Fraction(1, 2)) == 0
    assert round_half_toward_zero(Fraction(3, 2)) == 1
    assert round_half_toward_zero(Fraction(-3, 2)) == -1
    assert round_half_toward_zero(Fraction(7, 4)) == 2


def test_cantor_distance_ultrametric_exhaustive():
    ws = list(iter_words(6))
    for x in ws[::3]:
        for y in ws[::2]:
            for z in ws:
                assert cantor_distance(x, z) <= max(cantor_distance(x, y), cantor_distance(y, z))


def test_phi_distance():
    assert phi_distance("0001", "0000", poly(1, 2)) == Fraction(1, 2 ** 9)
    assert cantor_distance("0001", "0000") == Fraction(1, 8)
    assert common_prefix_length("0101", "0110") == 2


@given(st.integers(-10 ** 6, 10 ** 6), st.integers(0, 40))
def test_dyadic_literals_roundtrip(a, k):
    x = Fraction(a, 2 ** k)
    assert parse_dyadic(format_dyadic(x)) == x


def test_stream_is_prefix_monotone():
    calls = []

    def extend(have):
        calls.append(have)
        return "01"

    s = Stream(extend, 10)
    assert s.prefix(3) == "010"
    assert s.prefix(6) == "010101"
    assert s.prefix(3) == "010"
    with pytest.raises(HorizonExceeded):
        s.prefix(11)
