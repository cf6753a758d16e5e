"""Digit-stream representations of the unit interval.

Binary (beta), rational (rho, decode only), dyadic (delta), signed binary
(sigma) and the family sigma_phi with signed digits only at the positions
in range(phi). Every function here works in exact rational arithmetic.

Conventions:
  * a sigma digit pair (b, b') on the wire means 2b + b' - 1; ``11`` is illegal.
  * sigma value is 1/2 + sum_j d_j 2^{-j-2}.
  * sigma_phi value is sum_m c_m 2^{-m-1}; position m takes two bits when
    m is in range(phi) and one bit otherwise.
"""
from __future__ import annotations

import math
import threading
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .cantor import (Stream, Word, bin_to_nat, check_word, delimit, nat_to_bin,
                     round_half_toward_zero, split_delimited)
from .moduli import GrowthFn, from_fn, identity
from .reps import InsufficientInput, RealRep

HALF = Fraction(1, 2)


class PrefixTooShort(InsufficientInput):
    pass


class MalformedBlocks(ValueError):
    pass


class IncompletePrefix(InsufficientInput):
    pass


class DomainViolation(ValueError):
    pass


class IllegalDigitPair(ValueError):
    pass


class DriftDetected(RuntimeError):
    pass


class StrictnessViolation(ValueError):
    pass


class CarryOverflow(RuntimeError):
    pass


class InconsistentApprox(ValueError):
    pass


class InconsistentSequence(InconsistentApprox):
    pass


def _pow2(k: int) -> Fraction:
    return Fraction(1, 1 << k) if k >= 0 else Fraction(1 << -k)


# point approximations

class PointApprox:
    """Oracle ``at(n)`` returning a dyadic within 2^{-n} of a fixed x in [0;1].

    Answers are memoised. Consistency is checked on every new answer
    against all earlier ones: the intervals [at(m) - 2^{-m}, at(m) + 2^{-m}]
    must share a point, which on the line is the same as pairwise overlap.
    """

    def __init__(self, fn: Callable[[int], Fraction], label: str = "",
                 error: type[InconsistentApprox] = InconsistentApprox):
        self._fn = fn
        self._memo: dict[int, Fraction] = {}
        self._lo = Fraction(-1)
        self._hi = Fraction(2)
        self._lock = threading.Lock()
        self._error = error
        self.label = label

    def at(self, n: int) -> Fraction:
        v = self._memo.get(n)
        if v is not None:
            return v
        v = Fraction(self._fn(n))
        with self._lock:
            lo = max(self._lo, v - _pow2(n))
            hi = min(self._hi, v + _pow2(n))
            if lo > hi:
                raise self._error(f"{self.label}: at({n}) = {v} inconsistent with earlier answers")
            self._lo, self._hi = lo, hi
            self._memo[n] = v
        return v

    @classmethod
    def exact(cls, x) -> "PointApprox":
        """Approximations of a known rational x: nearest multiple of 2^{-n-1}."""
        x = Fraction(x)
        if not 0 <= x <= 1:
            raise ValueError(f"{x} outside [0;1]")
        return cls(lambda n: Fraction(round_half_toward_zero(x * (1 << (n + 1))), 1 << (n + 1)),
                   label=f"exact({x})")

    @classmethod
    def from_sequence(cls, ys: Sequence[Fraction], slack: int = 0) -> "PointApprox":
        """ys[n] within 2^{-n+slack} of x; at(n) reads ys[n + slack]."""
        def fn(n):
            i = n + slack
            if i >= len(ys):
                raise InsufficientInput(f"sequence has {len(ys)} terms, need index {i}")
            return ys[i]
        return cls(fn, label="sequence", error=InconsistentSequence)

    @classmethod
    def from_prefix(cls, rep: RealRep, prefix: Word) -> "PointApprox":
        """Approximations read off a finite name prefix of ``rep``.

        at(n) is the midpoint of the image of the shortest initial segment
        whose image has width <= 2^{-n+1}; the answer therefore depends only
        on that segment, which keeps every encoder built on top monotone.
        """
        scan = rep.hull_scan(prefix)
        seen: list[tuple[int, Fraction, Fraction]] = []

        def fn(n):
            if n <= 1:
                return HALF
            target = _pow2(n - 1)
            for L, lo, hi in seen:
                if hi - lo <= target:
                    return (lo + hi) / 2
            for L, lo, hi in scan:
                seen.append((L, lo, hi))
                if hi - lo <= target:
                    return (lo + hi) / 2
            raise InsufficientInput(f"{rep.name}: prefix of {len(prefix)} bits too short for precision {n}")

        return cls(fn, label=f"{rep.name}-prefix")


# sigma digit helpers

def pairs_to_digits(w: Word) -> list[int]:
    if len(w) % 2:
        w = w[:-1]
    out = []
    for i in range(0, len(w), 2):
        b, b2 = w[i], w[i + 1]
        if b == "1" and b2 == "1":
            raise IllegalDigitPair(f"wire pair 11 at offset {i}")
        out.append(2 * (b == "1") + (b2 == "1") - 1)
    return out


_PAIR = {-1: "00", 0: "01", 1: "10"}


def digits_to_pairs(ds: Iterable[int]) -> Word:
    try:
        return "".join(_PAIR[d] for d in ds)
    except KeyError as e:
        raise IllegalDigitPair(f"digit {e.args[0]} not in {{-1,0,1}}") from None


_TEXT = {-1: "-", 0: "0", 1: "+"}
_FROM_TEXT = {"-": -1, "0": 0, "+": 1}


def signed_to_text(w: Word) -> str:
    return "".join(_TEXT[d] for d in pairs_to_digits(w))


def text_to_signed(s: str) -> Word:
    """Accept '-','0','+' digit characters or raw wire bits."""
    s = "".join(s.split())
    if any(c in "-+" for c in s):
        return digits_to_pairs(_FROM_TEXT[c] for c in s)
    check_word(s)
    pairs_to_digits(s)
    return s


# binary

def binary_decode(prefix: Word, n: int) -> Fraction:
    if len(prefix) < n:
        raise PrefixTooShort(f"need {n} bits, have {len(prefix)}")
    return sum((Fraction(1, 1 << (m + 1)) for m in range(n) if prefix[m] == "1"), Fraction(0))


class BinaryRep(RealRep):
    name = "binary"

    def __init__(self):
        self.modulus = identity()

    def image(self, prefix):
        v = binary_decode(prefix, len(prefix))
        return v, v + _pow2(len(prefix))

    def hull_scan(self, prefix):
        v = Fraction(0)
        yield 0, Fraction(0), Fraction(1)
        for L in range(1, len(prefix) + 1):
            if prefix[L - 1] == "1":
                v += _pow2(L)
            yield L, v, v + _pow2(L)

    def decode(self, prefix, n):
        return binary_decode(prefix, n)

    def children(self, prefix):
        return ["0", "1"]


def binary_encode_exact(x: Fraction, n: int) -> Word:
    """First n bits of the binary expansion of x in [0;1) (floor digits)."""
    x = Fraction(x)
    out = []
    for _ in range(n):
        x *= 2
        if x >= 1:
            out.append("1")
            x -= 1
        else:
            out.append("0")
    return "".join(out)


def binary_triple_prefix(prefix: Word) -> Word:
    """Output bits of x -> 3x on [0;1/3] determined by a binary input prefix.

    An output word w is safe when every value 3x, x in the input cylinder
    intersected with [0;1/3], lies in the closed dyadic interval of w.
    The returned word is the longest safe one.
    """
    lo, hi = BinaryRep().image(prefix)
    hi = min(hi, Fraction(1, 3))
    if lo > hi:
        raise DomainViolation("input cylinder misses [0;1/3]")
    lo, hi = 3 * lo, 3 * hi
    out = []
    base = Fraction(0)
    k = 0
    while True:
        k += 1
        w = _pow2(k)
        if base <= lo and hi <= base + w:
            out.append("0")
        elif base + w <= lo and hi <= base + 2 * w:
            out.append("1")
            base += w
        else:
            return "".join(out)
        if k > 4 * len(prefix) + 8:
            return "".join(out)


# rational (decode only)

def _parse_rational_blocks(prefix: Word) -> list[tuple[int, int]]:
    blocks, _ = split_delimited(prefix)
    out = []
    for i in range(0, len(blocks) - 1, 2):
        a, c = bin_to_nat(blocks[i]), bin_to_nat(blocks[i + 1])
        if c == 0:
            raise MalformedBlocks(f"zero denominator in block pair {i // 2}")
        out.append((a, c))
    return out


def rational_decode(prefix: Word, k: int) -> Fraction:
    """Dyadic within 2^{-k} + 2^{-k-1} of the value: a_k/c_k rounded to 2^{-k-1}."""
    pairs = _parse_rational_blocks(prefix)
    if len(pairs) < k + 1:
        raise IncompletePrefix(f"need {k + 1} block pairs, prefix holds {len(pairs)}")
    for i, (a, c) in enumerate(pairs[:k + 1]):
        q = Fraction(a, c)
        if q < -_pow2(i) or q > 1 + _pow2(i):
            raise DomainViolation(f"a_{i}/c_{i} = {q} is farther than 2^-{i} from [0;1]")
    a, c = pairs[k]
    return Fraction(round_half_toward_zero(Fraction(a, c) * (1 << (k + 1))), 1 << (k + 1))


def rational_name(pairs: Sequence[tuple[int, int]]) -> Word:
    return "".join(delimit(nat_to_bin(a)) + delimit(nat_to_bin(c)) for a, c in pairs)


# dyadic

def _check_dyadic_blocks(blocks: Sequence[Word]) -> tuple[list[int], Fraction, Fraction]:
    """Integers a_k and the interval left by the domain condition."""
    lo, hi = Fraction(0), Fraction(1)
    avals = []
    for k, blk in enumerate(blocks):
        a = bin_to_nat(blk)
        if a > (1 << k):
            raise DomainViolation(f"a_{k} = {a} exceeds 2^{k}")
        c = Fraction(a, 1 << k)
        lo = max(lo, c - _pow2(k))
        hi = min(hi, c + _pow2(k))
        if lo > hi:
            raise DomainViolation(f"block {k} (a={a}) contradicts earlier blocks")
        avals.append(a)
    return avals, lo, hi


def dyadic_decode(prefix: Word, n: int) -> Fraction:
    blocks, _ = split_delimited(prefix)
    if len(blocks) < n + 1:
        raise PrefixTooShort(f"need {n + 1} blocks, prefix holds {len(blocks)}")
    avals, _, _ = _check_dyadic_blocks(blocks[:n + 1])
    return Fraction(avals[n], 1 << n)


def dyadic_block(a: int) -> Word:
    return delimit(nat_to_bin(a))


def dyadic_name(avals: Sequence[int]) -> Word:
    return "".join(dyadic_block(a) for a in avals)


def dyadic_canonical(r: Fraction, blocks: int) -> list[int]:
    """a_n = round(r 2^n), the canonical name used in the neighbour property."""
    r = Fraction(r)
    return [round_half_toward_zero(r * (1 << n)) for n in range(blocks)]


def _partial_block(q: str) -> tuple[int, int, int]:
    """(value of fixed low bits, number of fixed bits, minimal bin length)."""
    fixed = 0
    i = 0
    pos = 0
    while pos + 1 < len(q):
        if q[pos] != "0":
            raise MalformedBlocks("terminator inside a partial block")
        if q[pos + 1] == "1":
            fixed |= 1 << i
        i += 1
        pos += 2
    min_len = i + (1 if pos < len(q) else 0)
    return fixed, i, min_len


def _extreme_candidate(k: int, fixed: int, nfixed: int, min_len: int,
                       a_lo: int, a_hi: int) -> tuple[int, int] | None:
    """Least and greatest a in [a_lo, a_hi] whose bin word starts with the
    fixed bits and has length >= min_len; None if there is none."""
    best_lo = best_hi = None
    for ell in range(min_len, max(k, 1) + 1):
        base = (1 << ell) - 1 + fixed
        if ell < nfixed:
            continue
        step = 1 << nfixed
        tmax = (1 << (ell - nfixed)) - 1
        lo_a = max(a_lo, base)
        hi_a = min(a_hi, base + step * tmax)
        if lo_a > hi_a:
            continue
        t0 = -(-(lo_a - base) // step)
        t1 = (hi_a - base) // step
        if t0 > t1:
            continue
        cand_lo, cand_hi = base + step * t0, base + step * t1
        best_lo = cand_lo if best_lo is None else min(best_lo, cand_lo)
        best_hi = cand_hi if best_hi is None else max(best_hi, cand_hi)
    if best_lo is None:
        return None
    return best_lo, best_hi


class DyadicRep(RealRep):
    """Names are blocks <bin(a_n)> with 0 <= a_n <= 2^n under the domain condition."""

    name = "dyadic"

    def __init__(self):
        self.modulus = from_fn(lambda n: 2 * (n + 1) * (n + 2), "2(n+1)(n+2)", strict=True)

    def image(self, prefix):
        blocks, tail = split_delimited(prefix)
        try:
            _, lo, hi = _check_dyadic_blocks(blocks)
        except DomainViolation:
            return None
        if not tail:
            return lo, hi
        k = len(blocks)
        try:
            fixed, nfixed, min_len = _partial_block(tail)
        except MalformedBlocks:
            return None
        scale = 1 << k
        a_lo = max(0, math.ceil(lo * scale) - 1)
        a_hi = min(scale, math.floor(hi * scale) + 1)
        ext = _extreme_candidate(k, fixed, nfixed, min_len, a_lo, a_hi)
        if ext is None:
            return None
        amin, amax = ext
        new_lo = max(lo, Fraction(amin, scale) - _pow2(k))
        new_hi = min(hi, Fraction(amax, scale) + _pow2(k))
        if new_lo > new_hi:
            return None
        return new_lo, new_hi

    def hull_scan(self, prefix):
        for L in range(len(prefix) + 1):
            im = self.image(prefix[:L])
            if im is None:
                raise DomainViolation(f"prefix leaves the domain at bit {L}")
            yield (L,) + im

    def decode(self, prefix, n):
        return dyadic_decode(prefix, n)

    def random_prefix(self, rng, length):
        """Prefix of a random name: each a_k uniform among the values the
        domain condition still allows."""
        lo, hi = Fraction(0), Fraction(1)
        out = []
        size = 0
        k = 0
        while size < length:
            scale = 1 << k
            a = rng.randint(max(0, math.ceil(lo * scale) - 1), min(scale, math.floor(hi * scale) + 1))
            c = Fraction(a, scale)
            lo, hi = max(lo, c - _pow2(k)), min(hi, c + _pow2(k))
            blk = dyadic_block(a)
            out.append(blk)
            size += len(blk)
            k += 1
        return "".join(out)[:length]


def dyadic_blocks(x: PointApprox) -> Iterator[int]:
    """a_n = round(x.at(n+1) 2^n), clamped to [0, 2^n]; stops when x runs dry."""
    n = 0
    while True:
        try:
            r = x.at(n + 1)
        except InsufficientInput:
            return
        a = round_half_toward_zero(r * (1 << n))
        yield min(max(a, 0), 1 << n)
        n += 1


def dyadic_encode(x: PointApprox, horizon: int) -> Stream:
    gen = dyadic_blocks(x)
    buf: list[str] = []

    def extend(have):
        try:
            return dyadic_block(next(gen))
        except StopIteration:
            return ""

    return Stream(extend, horizon, label="dyadic")


def dyadic_encode_word(x: PointApprox, blocks: int | None = None) -> Word:
    out = []
    for n, a in enumerate(dyadic_blocks(x)):
        if blocks is not None and n >= blocks:
            break
        out.append(dyadic_block(a))
    return "".join(out)


def quarter_witness(n: int, blocks: int) -> tuple[Word, Word, Fraction, Fraction]:
    """Two dyadic names 2^{-n} apart that share every block up to index n.

    The first names 3/4 canonically; the second replaces a_m by
    3*2^{m-2} + 2^{m-n} for m > n and names 3/4 + 2^{-n}.
    """
    if n < 2:
        raise ValueError("witness needs n >= 2")
    a = dyadic_canonical(Fraction(3, 4), blocks)
    b = [a[m] if m <= n else 3 * (1 << (m - 2)) + (1 << (m - n)) for m in range(blocks)]
    return dyadic_name(a), dyadic_name(b), Fraction(3, 4), Fraction(3, 4) + _pow2(n)


# signed binary

def signed_decode(prefix: Word, n: int) -> Fraction:
    if len(prefix) < 2 * n:
        raise PrefixTooShort(f"need {2 * n} bits, have {len(prefix)}")
    ds = pairs_to_digits(prefix[:2 * n])
    num = 0
    for d in ds:  # 1/2 + sum d_j 2^{-j-2}, accumulated over 2^{n+1}
        num = 2 * num + d
    return HALF + Fraction(num, 1 << (n + 1))


class SignedRep(RealRep):
    name = "signed"

    def __init__(self):
        self.modulus = from_fn(lambda n: 2 * n, "2n", strict=True)

    def image(self, prefix):
        k = len(prefix) // 2
        try:
            v = signed_decode(prefix, k)
        except IllegalDigitPair:
            return None
        t = _pow2(k + 1)
        if len(prefix) % 2 == 0:
            return v - t, v + t
        if prefix[-1] == "1":
            return v, v + t
        return v - t, v + t / 2

    def hull_scan(self, prefix):
        num = 0  # value = 1/2 + num / 2^{k+1}
        yield 0, Fraction(0), Fraction(1)
        for L in range(1, len(prefix) + 1):
            k = L // 2
            if L % 2 == 0:
                if prefix[L - 2] == "1" and prefix[L - 1] == "1":
                    raise IllegalDigitPair(f"wire pair 11 at offset {L - 2}")
                d = 2 * (prefix[L - 2] == "1") + (prefix[L - 1] == "1") - 1
                num = 2 * num + d
                v = HALF + Fraction(num, 1 << (k + 1))
                t = _pow2(k + 1)
                yield L, v - t, v + t
            else:
                v = HALF + Fraction(num, 1 << (k + 1))
                t = _pow2(k + 1)
                yield (L, v, v + t) if prefix[L - 1] == "1" else (L, v - t, v + t / 2)

    def decode(self, prefix, n):
        return signed_decode(prefix, n)

    def children(self, prefix):
        if len(prefix) % 2 and prefix[-1] == "1":
            return ["0"]
        return ["0", "1"]


def signed_digits(x: PointApprox) -> Iterator[int]:
    """Digits d_j of weight 2^{-j-2}, each chosen from x.at(j+3).

    With r' the running value (r' = 1/2 before any digit) the next digit
    is round(2^{j+2} (x.at(j+3) - r')) clamped to {-1,0,1}. Clamping only
    triggers near the ends of [0;1] and keeps |x - r'| <= 2^{-j-2}.
    """
    rp = HALF
    j = 0
    while True:
        n = j + 2
        try:
            r = x.at(n + 1)
        except InsufficientInput:
            return
        d = round_half_toward_zero((r - rp) * (1 << n))
        d = max(-1, min(1, d))
        rp += Fraction(d, 1 << n)
        if abs(r - rp) > 3 * _pow2(n + 1):
            raise DriftDetected(f"digit {j}: |r - r'| = {abs(r - rp)} exceeds 3*2^-{n + 1}")
        yield d
        j += 1


def signed_encode(x: PointApprox, horizon: int) -> Stream:
    gen = signed_digits(x)

    def extend(have):
        try:
            return _PAIR[next(gen)]
        except StopIteration:
            return ""

    return Stream(extend, horizon, label="signed")


def signed_encode_word(x: PointApprox, digits: int | None = None) -> Word:
    out = []
    for j, d in enumerate(signed_digits(x)):
        if digits is not None and j >= digits:
            break
        out.append(_PAIR[d])
    return "".join(out)


def signed_encode_exact(x: Fraction, digits: int) -> Word:
    """Integer-only encoder for a known rational x (same digits as the generic one)."""
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise ValueError(f"{x} outside [0;1]")
    return signed_encode_word(PointApprox.exact(x), digits)


# averaging transducer

class AveragingTransducer:
    """Finite-state transducer for (x + y)/2 on signed names.

    The state is the integer D = 2^{k+2} (input seen - output emitted)
    after k+1 input digit sums; it stays in [-5, 5]. Each round reads one
    digit from each input, then emits one output digit; the first round
    only loads the state, so output digit k depends on input digits 0..k+1.
    """

    STATES = tuple(range(-5, 6))

    def __init__(self):
        self.state: int | None = None

    @staticmethod
    def transition(state: int | None, a: int, b: int) -> tuple[int, int | None]:
        s = a + b
        if state is None:
            return s, None
        dd = 2 * state + s
        c = max(-1, min(1, round_half_toward_zero(Fraction(dd, 4))))
        nxt = dd - 4 * c
        if not -5 <= nxt <= 5:
            raise RuntimeError(f"state {nxt} escaped the bounded range")
        return nxt, c

    def step(self, a: int, b: int) -> int | None:
        self.state, out = self.transition(self.state, a, b)
        return out

    @classmethod
    def table(cls) -> dict[tuple, tuple]:
        """Full transition table, reachable part from the start state."""
        out = {}
        todo = [None]
        seen = set()
        while todo:
            st = todo.pop()
            if st in seen:
                continue
            seen.add(st)
            for a in (-1, 0, 1):
                for b in (-1, 0, 1):
                    nxt, c = cls.transition(st, a, b)
                    out[(st, a, b)] = (nxt, c)
                    todo.append(nxt)
        return out


def average_word(x: Word, y: Word) -> Word:
    """Output determined by two input prefixes (shorter one limits)."""
    dx, dy = pairs_to_digits(x), pairs_to_digits(y)
    t = AveragingTransducer()
    out = []
    for a, b in zip(dx, dy):
        c = t.step(a, b)
        if c is not None:
            out.append(_PAIR[c])
    return "".join(out)


def average(x: Stream, y: Stream, horizon: int) -> Stream:
    t = AveragingTransducer()
    pos = {"read": 0}

    def extend(have):
        while True:
            i = pos["read"]
            if 2 * (i + 1) > min(x.horizon, y.horizon):
                return ""
            a = pairs_to_digits(x.prefix(2 * (i + 1))[2 * i:])[0]
            b = pairs_to_digits(y.prefix(2 * (i + 1))[2 * i:])[0]
            pos["read"] = i + 1
            c = t.step(a, b)
            if c is not None:
                return _PAIR[c]

    return Stream(extend, horizon, label="average")


# sigma_phi

def _check_phi(phi: GrowthFn, upto: int) -> None:
    if phi(0) != 0:
        raise StrictnessViolation(f"phi(0) = {phi(0)} != 0")
    prev = 0
    k = 1
    while prev < upto:
        v = phi(k)
        if v <= prev:
            raise StrictnessViolation(f"phi({k}) = {v} <= phi({k - 1}) = {prev}")
        prev = v
        k += 1


def signed_positions(phi: GrowthFn, upto: int) -> set[int]:
    """range(phi) intersected with [0, upto)."""
    _check_phi(phi, upto)
    out = set()
    k = 0
    while True:
        v = phi(k)
        if v >= upto:
            return out
        out.add(v)
        k += 1


def sigma_phi_layout(phi: GrowthFn, n: int) -> list[int]:
    """offsets[m] = first bit of digit m, for m = 0..n (offsets[n] = bits for n digits)."""
    signed = signed_positions(phi, n)
    offs = [0]
    for m in range(n):
        offs.append(offs[-1] + (2 if m in signed else 1))
    return offs


def _parse_sigma_phi(prefix: Word, signed: set[int], n: int) -> list[int]:
    out = []
    pos = 0
    for m in range(n):
        if m in signed:
            pair = prefix[pos:pos + 2]
            if pair == "11":
                raise IllegalDigitPair(f"wire pair 11 at signed position {m}")
            out.append(2 * (pair[0] == "1") + (pair[1] == "1") - 1)
            pos += 2
        else:
            out.append(1 if prefix[pos] == "1" else 0)
            pos += 1
    return out


def sigma_phi_decode(prefix: Word, phi: GrowthFn, n: int) -> Fraction:
    offs = sigma_phi_layout(phi, n)
    if len(prefix) < offs[n]:
        raise PrefixTooShort(f"need {offs[n]} bits for {n} digits, have {len(prefix)}")
    ds = _parse_sigma_phi(prefix, signed_positions(phi, n), n)
    num = 0
    for d in ds:
        num = 2 * num + d
    return Fraction(num, 1 << n)


class SigmaPhiRep(RealRep):
    """sigma_phi restricted to names with value in [0;1].

    The image of a prefix needs the sum of 2^{-m-1} over the signed
    positions m beyond it; positions at or past ``tail_depth`` are all
    treated as signed, which is exact for phi = id and an outer bound
    (slack < 2^{-tail_depth}) otherwise.
    """

    def __init__(self, phi: GrowthFn, tail_depth: int = 256):
        self.phi = phi
        self.tail_depth = tail_depth
        self._signed = signed_positions(phi, tail_depth)
        self.name = f"sigma_phi[{phi.name}]"
        layout = self.layout

        def mod(n):
            return layout(n + 1)[n + 1]
        self.modulus = from_fn(mod, f"offset(n+1)[{phi.name}]", strict=True)

    def layout(self, n: int) -> list[int]:
        if n >= self.tail_depth:
            return sigma_phi_layout(self.phi, n)
        offs = [0]
        for m in range(n):
            offs.append(offs[-1] + (2 if m in self._signed else 1))
        return offs

    def is_signed(self, m: int) -> bool:
        return m in self._signed or m >= self.tail_depth

    def _neg_tail(self, k: int) -> Fraction:
        s = sum((_pow2(m + 1) for m in self._signed if m >= k), Fraction(0))
        return s + _pow2(max(k, self.tail_depth))

    def image(self, prefix):
        digits = []
        pos = 0
        m = 0
        L = len(prefix)
        partial = None
        while pos < L:
            if self.is_signed(m):
                if pos + 1 >= L:
                    partial = prefix[pos]
                    break
                pair = prefix[pos:pos + 2]
                if pair == "11":
                    return None
                digits.append(2 * (pair[0] == "1") + (pair[1] == "1") - 1)
                pos += 2
            else:
                digits.append(1 if prefix[pos] == "1" else 0)
                pos += 1
            m += 1
        k = len(digits)
        num = 0
        for d in digits:
            num = 2 * num + d
        v = Fraction(num, 1 << k)
        if partial is None:
            lo, hi = v - self._neg_tail(k), v + _pow2(k)
        else:
            rest_lo, rest_hi = -self._neg_tail(k + 1), _pow2(k + 1)
            if partial == "1":
                lo, hi = v + _pow2(k + 1) + rest_lo, v + _pow2(k + 1) + rest_hi
            else:
                lo, hi = v - _pow2(k + 1) + rest_lo, v + rest_hi
        lo, hi = max(lo, Fraction(0)), min(hi, Fraction(1))
        if lo > hi:
            return None
        return lo, hi

    def hull_scan(self, prefix):
        for L in range(len(prefix) + 1):
            im = self.image(prefix[:L])
            if im is None:
                raise DomainViolation(f"prefix leaves the domain at bit {L}")
            yield (L,) + im

    def decode(self, prefix, n):
        return sigma_phi_decode(prefix, self.phi, n)

    def children(self, prefix):
        return [b for b in "01" if self.image(prefix + b) is not None]


def _runs_word(digits: Sequence[int], phi: GrowthFn) -> Word:
    """Core of the sigma -> sigma_phi conversion on a list of sigma digits.

    Position m of the output has weight 2^{-m-1}; the sigma constant 1/2
    enters as a digit 1 at position 0 and sigma digit j sits at position
    j+1. Run k covers positions [phi(k-1), phi(k)); it is finalised once
    the input is known through position phi(k) (2 phi(k) input bits), by
    choosing the run's integer X so that the remainder lands in
    [-2^{-q-1}, 2^{-q}] with q = phi(k).
    """
    _check_phi(phi, 1)
    t = [1] + list(digits)  # t[m] at position m
    out = []
    pin = Fraction(0)   # input value through the last read position
    pout = Fraction(0)  # value of finalised output
    read = 0            # positions of t consumed into pin
    k = 1
    while True:
        p, q = phi(k - 1), phi(k)
        if q >= len(t):
            return "".join(out)
        while read <= q:
            pin += Fraction(t[read], 1 << (read + 1))
            read += 1
        E = (pin - pout) * (1 << (q + 1))
        assert E.denominator == 1
        E = E.numerator
        L = q - p
        X = E // 2
        if X < -(1 << (L - 1)) - 1 or X > (1 << L):
            raise CarryOverflow(f"run {k}: X = {X} outside the representable window")
        X = max(-(1 << (L - 1)), min((1 << L) - 1, X))
        if X < 0:
            c, U = -1, X + (1 << (L - 1))
        elif X < (1 << (L - 1)):
            c, U = 0, X
        else:
            c, U = 1, X - (1 << (L - 1))
        out.append(_PAIR[c])
        for i in range(L - 2, -1, -1):
            out.append("1" if (U >> i) & 1 else "0")
        pout += Fraction(X, 1 << q)
        k += 1


def sigma_to_sigma_phi_word(w: Word, phi: GrowthFn) -> Word:
    return _runs_word(pairs_to_digits(w), phi)


def sigma_to_sigma_phi(x: Stream, phi: GrowthFn, horizon: int) -> Stream:
    state = {"k": 1, "emitted": 0}

    def extend(have):
        k = state["k"]
        need = 2 * phi(k)
        if need > x.horizon:
            return ""
        out = sigma_to_sigma_phi_word(x.prefix(need), phi)
        state["k"] = k + 1
        return out[have:]

    return Stream(extend, horizon, label=f"sigma_phi[{phi.name}]")


def sigma_phi_conversion_modulus(phi: GrowthFn) -> GrowthFn:
    """Input bits needed for n output bits: 2 phi(k) with k least such that
    phi(k) + k >= n."""
    def f(n):
        k = 0
        while phi(k) + k < n:
            k += 1
        return 2 * phi(k)
    return from_fn(f, f"2{phi.name}∘loinv(id+{phi.name})")


# approximation sequences

def approx_to_signed(ys: Sequence[Fraction], horizon: int) -> Stream:
    """Signed name of x from y_n with |y_n - x| <= 2^{-n+3}."""
    return signed_encode(PointApprox.from_sequence(ys, slack=3), horizon)


def approx_to_signed_word(ys: Sequence[Fraction]) -> Word:
    return signed_encode_word(PointApprox.from_sequence(ys, slack=3))


# reductions as prefix transformers

def reduction_to_signed(source: RealRep) -> Callable[[Word], Word]:
    return lambda p: signed_encode_word(PointApprox.from_prefix(source, p))


def reduction_to_dyadic(source: RealRep) -> Callable[[Word], Word]:
    return lambda p: dyadic_encode_word(PointApprox.from_prefix(source, p))
