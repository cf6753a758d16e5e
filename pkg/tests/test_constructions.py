import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import hausdorff_brute
from qadmit.cantor import round_half_toward_zero
from qadmit.entropy import LineGrid, NotConnectedAtScale, grid, random_space
from qadmit.harness import make_reduction, real_name
from qadmit.moduli import from_fn, table
from qadmit.standard_rep import StandardRealRep
from qadmit.constructions import (DomainMismatch, GridBinaryRep, HyperspaceRep, InconsistentBits,
                                  LipschitzNets, NotLipschitzOnZ, ProductSchedule, Realizer,
                                  ScheduleInconsistent, application_signed, application_value,
                                  binary_product, code_count_bound, compose_reductions,
                                  count_level_codes, identity_realizer, lip1_net_functions,
                                  lipschitz_decode, lipschitz_encode, mcshane_whitney, min_input_length,
                                  naive_countable_product, product_distance, random_lipschitz_on_grid,
                                  scheduled_countable_product)
from qadmit.unit_interval import BinaryRep, DyadicRep, SignedRep, signed_decode

words = st.text(alphabet="01", min_size=40, max_size=40)


def p2(n):
    return Fraction(1, 2 ** n)


# binary products

@settings(max_examples=50, deadline=None)
@given(words)
def test_binary_projection_moduli(w):
    P = binary_product(BinaryRep(), BinaryRep())
    for pr in (P.project_left(), P.project_right()):
        for m in range(1, 20):
            assert min_input_length(pr.fn, w, m) <= pr.modulus(m)


@settings(max_examples=50, deadline=None)
@given(words, words)
def test_binary_embedding_moduli_are_exact(x, y):
    P = binary_product(BinaryRep(), BinaryRep())
    left, right = P.embed_left(y), P.embed_right(x)
    for m in range(1, 30):
        assert min_input_length(left.fn, x, m) == left.modulus(m) == (m + 1) // 2
        assert min_input_length(right.fn, y, m) == right.modulus(m) == m // 2


def test_binary_product_decodes_pairs():
    P = binary_product(SignedRep(), BinaryRep())
    rng = random.Random(0)
    for _ in range(50):
        x, y = Fraction(rng.randrange(4097), 4096), Fraction(rng.randrange(4097), 4096)
        w = P.interleave(real_name(SignedRep(), x, 24)[:48], real_name(BinaryRep(), y, 48)[:48])
        for n in range(11):
            a, b = P.decode(w[:P.modulus(n)], n)
            assert max(abs(a - x), abs(b - y)) <= p2(n)


# countable products

REPS = [SignedRep(), BinaryRep(), StandardRealRep(), SignedRep(), BinaryRep(), StandardRealRep(),
        SignedRep(), BinaryRep()]


@pytest.fixture(scope="module")
def product():
    return scheduled_countable_product(REPS, 12)


def test_schedule_is_consistent(product):
    P, sched = product
    assert sched.verify() == []
    for n in range(13):
        assert sched.kappa(n) == sum(REPS[j].modulus(n - j) for j in range(min(n, 8)))


def test_schedule_rejects_nonzero_start():
    bad = table([1, 2, 3, 4])
    with pytest.raises(ScheduleInconsistent):
        ProductSchedule([bad], 4)
    assert ProductSchedule.normalized([bad], 4).verify() == []


def test_schedule_is_linear_in_components():
    # all binary components: sum_{j<n} (n-j) = n(n+1)/2 bits after n rounds
    P, sched = scheduled_countable_product([BinaryRep()] * 6, 6)
    assert sched.round_ends == [0, 1, 3, 6, 10, 15, 21]


def test_naive_product_is_superlinear():
    naive = naive_countable_product([BinaryRep()] * 8)
    P, sched = scheduled_countable_product([BinaryRep()] * 8, 8)
    # the modulus bounds component j by pair(j, n - j) = n(n+1)/2 + j
    assert [naive.modulus(n) for n in range(1, 9)] == [n * (n + 1) // 2 + n - 1 for n in range(1, 9)]
    assert all(naive.modulus(n) > sched.kappa(n) for n in range(3, 9))


def test_naive_product_roundtrip():
    reps = [BinaryRep()] * 4
    naive = naive_countable_product(reps)
    rng = random.Random(1)
    for _ in range(20):
        xs = [Fraction(rng.randrange(1025), 1024) for _ in reps]
        names = [real_name(BinaryRep(), x, 40) for x in xs]
        w = naive.encode_word(names, naive.modulus(8))
        assert product_distance(reps, xs, naive.decode(w, 8)) <= p2(8)


def test_projection_moduli(product):
    P, sched = product
    rng = random.Random(2)
    name = "".join(rng.choice("01") for _ in range(sched.kappa(12)))
    for j in range(8):
        pr = P.project(j)
        for m in range(1, REPS[j].modulus(12 - j) + 1):
            assert min_input_length(pr.fn, name, m) == pr.modulus(m)


def test_product_roundtrip(product):
    P, sched = product
    rng = random.Random(3)
    for _ in range(30):
        xs = [Fraction(rng.randrange(1 << 20), 1 << 20) for _ in REPS]
        names = [real_name(r, x, 16) for r, x in zip(REPS, xs)]
        w = P.encode_word(names)
        for n in range(13):
            assert product_distance(REPS, xs, P.decode(w[:sched.kappa(n)], n)) <= p2(n)


def test_embedding_roundtrip(product):
    P, sched = product
    names = [real_name(r, Fraction(1, 3), 16) for r in REPS]
    emb = P.embed(2, names)
    x = real_name(REPS[2], Fraction(5, 7), 16)
    out = emb(x)
    dec = P.decode(out, P.rounds_in(len(out)))
    assert abs(dec[2] - Fraction(5, 7)) <= p2(P.rounds_in(len(out)) - 2)


# hyperspace

@pytest.fixture(scope="module")
def hyper():
    return HyperspaceRep(GridBinaryRep(grid(6), 6))


def test_hyperspace_roundtrip(hyper):
    rng = random.Random(4)
    for _ in range(60):
        A = sorted({rng.randrange(65) for _ in range(rng.randint(1, 5))})
        w = hyper.encode(A, 6)
        hyper.check(w)
        for n in range(7):
            assert hausdorff_brute(A, hyper.decode(w, n), hyper.space.dist) <= p2(n)


def test_hyperspace_singletons(hyper):
    for x in range(65):
        w = hyper.encode([x], 5)
        for n in range(6):
            D = hyper.decode(w, n)
            assert len(D) <= 2
            assert all(hyper.space.dist(x, d) <= p2(n) for d in D)


def test_hyperspace_modulus_law(hyper):
    rng = random.Random(5)
    sets = [sorted({rng.randrange(65) for _ in range(rng.randint(1, 4))}) for _ in range(80)]
    for m in range(1, 6):
        L = hyper.modulus(m)
        codes = [hyper.encode(A, m)[:L] for A in sets]
        for i in range(len(sets)):
            for j in range(i):
                if codes[i] == codes[j]:
                    assert hyper.hausdorff(sets[i], sets[j]) <= p2(m)


def test_hyperspace_two_sided_clauses(hyper):
    H2 = HyperspaceRep(hyper.base, two_sided=True)
    A = [3, 40, 41]
    assert H2.clause_violations(A, H2.encode(A, 4)) == []


def test_hyperspace_rejects_bad_names(hyper):
    w = list(hyper.encode([0], 3))
    w[0] = "0"
    with pytest.raises(InconsistentBits):
        hyper.check("".join(w))
    with pytest.raises(ValueError):
        hyper.encode([], 3)


# McShane-Whitney

def test_mcshane_whitney_extends():
    rng = random.Random(6)
    for _ in range(20):
        S = random_space(rng, rng.randint(5, 20))
        Z = sorted(rng.sample(range(len(S)), rng.randint(1, 4)))
        L = Fraction(rng.randint(1, 8), 4)
        anchor = rng.randrange(len(S))
        f = [L * S.dist(anchor, z) for z in Z]
        ext = mcshane_whitney(Z, f, L, S)
        for i, z in enumerate(Z):
            assert ext.low[z] == ext.mid[z] == ext.high[z] == f[i]
        for x in range(len(S)):
            assert ext.low[x] <= ext.mid[x] <= ext.high[x]
            for y in range(x):
                for g in (ext.low, ext.mid, ext.high):
                    assert abs(g[x] - g[y]) <= L * S.dist(x, y)


def test_mcshane_whitney_rejects_non_lipschitz():
    S = grid(2)
    with pytest.raises(NotLipschitzOnZ):
        mcshane_whitney([0, 1], [0, 1], 1, S)


def test_lip1_net_functions_separate():
    S = grid(4)
    count, least = lip1_net_functions(S, [0, 8, 16], 3)
    assert count == 8 and least >= p2(4)


# Lipschitz codes

@pytest.fixture(scope="module")
def nets():
    return LipschitzNets(GridBinaryRep(LineGrid(12), 12), 12)


def test_identity_function_code(nets):
    S = nets.space
    f = [Fraction(j, 1 << 12) for j in range(len(S))]
    code = lipschitz_encode(f, nets, 8)
    assert len(code) == nets.prefix_length(8)
    for n in range(9):
        lev = nets.level(n)
        assert lev.code_len == n + 1 + 4 * (lev.size - 1)
        got = lipschitz_decode(code, nets, n)
        assert got == {c: Fraction(round_half_toward_zero(f[c] * 2 ** n), 2 ** n) for c in lev.centers}


def test_application_bound(nets):
    rng = random.Random(7)
    g = nets.base
    for _ in range(30):
        f = random_lipschitz_on_grid(rng, 12)
        code = lipschitz_encode(f, nets)
        j = rng.randrange(len(nets.space))
        xn = g.name_of(j, 30)
        for n in range(13):
            assert abs(application_value(code, xn, nets, n) - f[j]) <= Fraction(8, 2 ** n)
        s = application_signed(code, xn, nets, 6)
        for n in range(7):
            assert abs(signed_decode(s, n) - f[j]) <= p2(n)


def test_code_count_bound():
    small = LipschitzNets(GridBinaryRep(grid(3), 3), 2)
    for n in range(3):
        lev = small.level(n)
        codes, tables = count_level_codes(lev, small.space)
        assert tables <= codes <= code_count_bound(n, lev.size)


def test_nets_need_connected_scales():
    with pytest.raises(NotConnectedAtScale):
        LipschitzNets(GridBinaryRep(grid(3), 3), 6)


# reductions

def test_signed_dyadic_signed_chain():
    sd = make_reduction(SignedRep(), DyadicRep())
    ds = make_reduction(DyadicRep(), SignedRep())
    chain = compose_reductions(sd, ds)
    rng = random.Random(8)
    for _ in range(20):
        x = Fraction(rng.randrange(1025), 1024)
        out = chain(real_name(SignedRep(), x, 14))
        for n in range(8):
            assert abs(signed_decode(out, n) - x) <= p2(n)


def test_compose_moduli_and_identity():
    F = Realizer(lambda w: w[::2], from_fn(lambda n: 2 * n, "2n"), "a", "b", "half")
    G = Realizer(lambda w: w + w, from_fn(lambda n: (n + 1) // 2, "ceil"), "b", "c", "dup")
    H = compose_reductions(F, G)
    assert H("0110") == "0101"
    assert [H.modulus(n) for n in range(6)] == [0, 2, 2, 4, 4, 6]
    assert compose_reductions(identity_realizer("a"), F) is F
    with pytest.raises(DomainMismatch):
        compose_reductions(G, F)
