import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import binary_series, signed_series
from qadmit.moduli import identity, poly, table, upper_semi_inverse
from qadmit.unit_interval import (AveragingTransducer, BinaryRep, DyadicRep, IllegalDigitPair,
                                  InconsistentApprox, PointApprox, PrefixTooShort, SignedRep,
                                  SigmaPhiRep, StrictnessViolation, approx_to_signed_word, average_word,
                                  binary_decode, dyadic_blocks, dyadic_canonical, dyadic_decode, dyadic_encode_word,
                                  dyadic_name, pairs_to_digits, quarter_witness, rational_decode,
                                  rational_name, sigma_phi_conversion_modulus, sigma_phi_decode,
                                  sigma_phi_layout, sigma_to_sigma_phi_word, signed_decode,
                                  signed_encode_exact, signed_encode_word, signed_to_text,
                                  text_to_signed)

dyadics = st.builds(lambda a, k: Fraction(a % (2 ** k + 1), 2 ** k), st.integers(0, 2 ** 40), st.integers(0, 30))


def p2(n):
    return Fraction(1, 2 ** n)


# binary

def test_binary_decode_matches_series():
    rng = random.Random(0)
    for _ in range(200):
        w = "".join(rng.choice("01") for _ in range(64))
        for n in (0, 1, 17, 64):
            assert binary_decode(w, n) == binary_series(w[:n])
            assert abs(binary_series(w) - binary_decode(w, n)) <= p2(n)


def test_binary_prefix_too_short():
    with pytest.raises(PrefixTooShort):
        binary_decode("01", 3)


# rational blocks

def test_rational_half():
    assert rational_decode(rational_name([(1, 2)]), 0) == Fraction(1, 2)


def test_rational_third():
    v = rational_decode(rational_name([(1, 2), (1, 3)]), 1)
    assert abs(v - Fraction(1, 3)) <= p2(2)


# dyadic

def test_three_quarter_blocks():
    avals = dyadic_canonical(Fraction(3, 4), 6)
    assert avals == [1, 1, 3, 6, 12, 24]
    assert dyadic_decode(dyadic_name(avals), 5) == Fraction(24, 32)


def test_dyadic_modulus_suffices():
    rep = DyadicRep()
    for n in range(8):
        w = dyadic_name([2 ** k for k in range(n + 1)])
        assert len(w) <= rep.modulus(n)


def test_dyadic_half_blocks():
    avals = list(zip(range(12), dyadic_blocks(PointApprox.exact(Fraction(1, 2)))))
    assert [a for _, a in avals[1:]] == [2 ** (n - 1) for n in range(1, 12)]


@settings(max_examples=500, deadline=None)
@given(dyadics)
def test_dyadic_roundtrip(x):
    w = dyadic_encode_word(PointApprox.exact(x), 14)
    for n in range(14):
        assert abs(dyadic_decode(w, n) - x) <= p2(n)


def test_quarter_witness():
    a, b, x, y = quarter_witness(5, 10)
    assert y - x == p2(5)
    rep = DyadicRep()
    k = 0
    while a[k] == b[k]:
        k += 1
    assert k >= len(dyadic_name(dyadic_canonical(Fraction(3, 4), 6)))
    assert k >= 5 * 5
    assert rep.image(a)[0] <= x <= rep.image(a)[1]
    assert rep.image(b)[0] <= y <= rep.image(b)[1]


# signed

def test_signed_one_is_all_plus():
    assert signed_to_text(signed_encode_exact(Fraction(1), 12)) == "+" * 12
    assert signed_to_text(signed_encode_exact(Fraction(0), 12)) == "-" * 12


@settings(max_examples=500, deadline=None)
@given(dyadics)
def test_signed_roundtrip(x):
    w = signed_encode_exact(x, 30)
    assert signed_decode(w, 30) == signed_series(pairs_to_digits(w))
    for n in range(31):
        assert abs(signed_decode(w, n) - x) <= p2(n)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from([-1, 0, 1]), min_size=20, max_size=20),
       st.lists(st.sampled_from([-1, 0, 1]), min_size=20, max_size=20), st.integers(0, 10))
def test_signed_prefix_law(d1, d2, n):
    # names agreeing on the first 2n bits denote values within 2^-n
    a = d1[:n] + d2[n:]
    assert abs(signed_series(d1) - signed_series(a)) <= p2(n)


def test_signed_text_and_bits():
    assert text_to_signed("+0-") == "100100"
    assert text_to_signed("100100") == "100100"
    with pytest.raises(IllegalDigitPair):
        text_to_signed("11")


def test_signed_image_is_hull():
    rep = SignedRep()
    lo, hi = rep.image("10")
    assert (lo, hi) == (Fraction(1, 2), Fraction(1))


# averaging

def test_average_of_zero_and_one():
    w = average_word("00" * 30, "10" * 30)
    assert abs(signed_decode(w, len(w) // 2) - Fraction(1, 2)) <= p2(len(w) // 2)


@settings(max_examples=200, deadline=None)
@given(dyadics, dyadics)
def test_average_exact(x, y):
    n = 48
    w = average_word(signed_encode_exact(x, n + 1), signed_encode_exact(y, n + 1))
    assert abs(signed_decode(w, n) - (x + y) / 2) <= p2(n)


def test_transducer_is_finite():
    tab = AveragingTransducer.table()
    states = {s for s, _, _ in tab}
    assert states <= set(AveragingTransducer.STATES) | {None}
    assert len(tab) == 54


def test_average_lookahead():
    # output digit k depends only on input digits 0..k+1
    rng = random.Random(1)
    for _ in range(200):
        x = "".join(rng.choice(["00", "01", "10"]) for _ in range(12))
        y = "".join(rng.choice(["00", "01", "10"]) for _ in range(12))
        full = average_word(x, y)
        for k in range(10):
            assert average_word(x[:2 * (k + 2)], y[:2 * (k + 2)])[:2 * (k + 1)] == full[:2 * (k + 1)]


# sigma_phi

def test_sigma_id_recovers_signed():
    rng = random.Random(2)
    for _ in range(100):
        w = "".join(rng.choice(["00", "01", "10"]) for _ in range(16))
        for n in range(17):
            assert sigma_phi_decode("10" + w, identity(), n + 1) == signed_decode(w, n)


def test_sigma_square_layout():
    phi = poly(1, 2)
    up = upper_semi_inverse(phi)
    for n in range(1, 60):
        extra = 0 if n in {k * k for k in range(9)} else 1
        assert sigma_phi_layout(phi, n)[n] == n + up(n) + extra


def test_sigma_phi_needs_strict_phi():
    with pytest.raises(StrictnessViolation):
        sigma_phi_layout(table([0, 1, 1, 2], strict=False), 5)


def test_conversion_identity_is_exact():
    rng = random.Random(3)
    for _ in range(100):
        w = "".join(rng.choice(["00", "01", "10"]) for _ in range(20))
        out = sigma_to_sigma_phi_word(w, identity())
        q = len(out) // 2 - 1
        # the remainder after the last finalised run stays in [-2^{-q-1}, 2^{-q}],
        # so the denoted reals coincide once both names continue
        rest = signed_decode(w, 20) - sigma_phi_decode(out, identity(), q + 1)
        assert -p2(q + 1) <= rest <= p2(q)


def test_conversion_square_within_bound():
    phi = poly(1, 2)
    rng = random.Random(4)
    for _ in range(200):
        w = "".join(rng.choice(["00", "01", "10"]) for _ in range(450))
        out = sigma_to_sigma_phi_word(w, phi)
        x = signed_decode(w, 225)
        for n in range(21):
            assert abs(sigma_phi_decode(out, phi, n) - x) <= p2(n)


def test_conversion_modulus_values():
    mod = sigma_phi_conversion_modulus(poly(1, 2))
    expect = [2 * min(k for k in range(10) if k * k + k >= n) ** 2 for n in range(20)]
    assert [mod(n) for n in range(20)] == expect
    assert expect[:8] == [0, 2, 2, 8, 8, 8, 8, 18]


def test_sigma_phi_rep_image_contains_decodes():
    rep = SigmaPhiRep(poly(1, 2))
    w = sigma_to_sigma_phi_word(signed_encode_exact(Fraction(1, 3), 60), poly(1, 2))
    for L in range(0, len(w), 3):
        lo, hi = rep.image(w[:L])
        assert lo <= Fraction(1, 3) <= hi


# approximations

def test_truncations_of_third_to_signed():
    ys = [Fraction(int(Fraction(1, 3) * 2 ** n), 2 ** n) for n in range(40)]
    w = approx_to_signed_word(ys)
    for n in range(len(w) // 2 + 1):
        assert abs(signed_decode(w, n) - Fraction(1, 3)) <= p2(n)


def test_inconsistent_approximations_raise():
    x = PointApprox(lambda n: Fraction(0) if n < 3 else Fraction(1))
    x.at(2)
    with pytest.raises(InconsistentApprox):
        x.at(3)


def test_from_prefix_binary():
    x = PointApprox.from_prefix(BinaryRep(), "0101010101")
    assert abs(x.at(8) - Fraction(1, 3)) <= p2(8)
    w = signed_encode_word(x)
    assert abs(signed_decode(w, 5) - Fraction(1, 3)) <= p2(5)
