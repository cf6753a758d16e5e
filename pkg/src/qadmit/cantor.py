"""Finite words, horizon-bounded streams, Cantor metrics and the integer
encodings used to lay out names (pairing, self-delimiting words, bin).

Words are plain ``str`` values over ``'0'``/``'1'``; exact reals are
``fractions.Fraction`` values, dyadic wherever the code produces them.
"""
from __future__ import annotations

import re
import threading
from fractions import Fraction
from typing import Callable, Iterator

from .moduli import GrowthFn

Word = str


class LengthMismatch(ValueError):
    pass


class MalformedDelimitedWord(ValueError):
    pass


class HorizonExceeded(IndexError):
    pass


def check_word(w: str) -> str:
    if any(c not in "01" for c in w):
        raise ValueError(f"not a binary word: {w!r}")
    return w


def read_name(text: str) -> Word:
    """Name file contents: '0'/'1' characters, whitespace ignored."""
    return check_word("".join(text.split()))


# dyadic helpers

_DYADIC_RE = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(?:2\^(\d+)|(\d+)))?\s*$")


def dyadic(a: int, k: int = 0) -> Fraction:
    return Fraction(a, 1 << k)


def parse_dyadic(s: str) -> Fraction:
    """Parse "a/2^k", "a/b" with b a power of two, or an integer."""
    m = _DYADIC_RE.match(str(s))
    if not m:
        raise ValueError(f"not a dyadic literal: {s!r}")
    num = int(m.group(1))
    if m.group(2) is not None:
        return Fraction(num, 1 << int(m.group(2)))
    if m.group(3) is not None:
        den = int(m.group(3))
        if den <= 0 or den & (den - 1):
            raise ValueError(f"denominator of {s!r} is not a power of two")
        return Fraction(num, den)
    return Fraction(num)


def format_dyadic(x: Fraction) -> str:
    x = Fraction(x)
    den = x.denominator
    if den & (den - 1):
        return f"{x.numerator}/{den}"
    return f"{x.numerator}/2^{den.bit_length() - 1}"


def is_dyadic(x: Fraction) -> bool:
    d = Fraction(x).denominator
    return d & (d - 1) == 0


def round_half_toward_zero(r: Fraction) -> int:
    """Nearest integer, ties broken towards 0."""
    r = Fraction(r)
    if r < 0:
        return -round_half_toward_zero(-r)
    fl = r.numerator // r.denominator
    frac = r - fl
    return fl + 1 if frac > Fraction(1, 2) else fl


# metrics

def _first_difference(x: Word, y: Word) -> int | None:
    if len(x) != len(y):
        raise LengthMismatch(f"lengths {len(x)} and {len(y)}")
    for i, (a, b) in enumerate(zip(x, y)):
        if a != b:
            return i
    return None


def cantor_distance(x: Word, y: Word) -> Fraction:
    """2^{-first difference}; 0 when the words agree (read: <= 2^{-len})."""
    i = _first_difference(x, y)
    return Fraction(0) if i is None else Fraction(1, 1 << i)


def phi_distance(x: Word, y: Word, phi: GrowthFn) -> Fraction:
    i = _first_difference(x, y)
    return Fraction(0) if i is None else Fraction(1, 1 << phi(i))


def common_prefix_length(x: Word, y: Word) -> int:
    n = min(len(x), len(y))
    for i in range(n):
        if x[i] != y[i]:
            return i
    return n


# integer codes

def pair(n: int, m: int) -> int:
    s = n + m
    return s * (s + 1) // 2 + n


def unpair(k: int) -> tuple[int, int]:
    if k < 0:
        raise ValueError("negative code")
    # largest s with s(s+1)/2 <= k
    s = (int((8 * k + 1) ** 0.5) - 1) // 2
    while s * (s + 1) // 2 > k:
        s -= 1
    while (s + 1) * (s + 2) // 2 <= k:
        s += 1
    n = k - s * (s + 1) // 2
    return n, s - n


def delimit(x: Word) -> Word:
    return "".join("0" + c for c in x) + "1"


def undelimit(w: Word, start: int = 0) -> tuple[Word, int]:
    """Decode one self-delimiting word starting at ``start``.

    Returns the payload and the offset just after it. Raises
    MalformedDelimitedWord if the input ends before the terminating 1.
    """
    out = []
    i = start
    n = len(w)
    while True:
        if i >= n:
            raise MalformedDelimitedWord(f"no terminator after offset {start}")
        if w[i] == "1":
            return "".join(out), i + 1
        if i + 1 >= n:
            raise MalformedDelimitedWord(f"truncated pair at offset {i}")
        out.append(w[i + 1])
        i += 2


def split_delimited(w: Word) -> tuple[list[Word], Word]:
    """All complete self-delimiting blocks of ``w`` plus the unread tail."""
    blocks = []
    pos = 0
    while True:
        try:
            payload, nxt = undelimit(w, pos)
        except MalformedDelimitedWord:
            return blocks, w[pos:]
        blocks.append(payload)
        pos = nxt


def nat_to_bin(a: int) -> Word:
    """Bijective binary code: a = 2^n - 1 + sum b_j 2^j for (b_0..b_{n-1})."""
    if a < 0:
        raise ValueError("negative integer")
    n = (a + 1).bit_length() - 1
    r = a - ((1 << n) - 1)
    return "".join("1" if (r >> j) & 1 else "0" for j in range(n))


def bin_to_nat(w: Word) -> int:
    n = len(w)
    return (1 << n) - 1 + sum(1 << j for j, c in enumerate(w) if c == "1")


# streams

class Stream:
    """Prefix generator for one name, total up to a declared horizon.

    ``extend(have)`` returns the next chunk of
    bits after the ``have`` already produced; chunks are cached, so later
    prefixes always extend earlier ones.
    """

    __slots__ = ("horizon", "_bits", "_extend", "_lock", "label")

    def __init__(self, extend: Callable[[int], str], horizon: int, label: str = ""):
        self.horizon = horizon
        self._bits: list[str] = []
        self._extend = extend
        self._lock = threading.Lock()
        self.label = label

    @classmethod
    def from_word(cls, w: Word, label: str = "") -> "Stream":
        check_word(w)
        return cls(lambda have: w[have:], len(w), label)

    @classmethod
    def from_prefix_fn(cls, prefix_fn: Callable[[int], Word], horizon: int,
                       label: str = "") -> "Stream":
        def extend(have):
            return prefix_fn(horizon)[have:]
        return cls(extend, horizon, label)

    def prefix(self, n: int) -> Word:
        if n > self.horizon:
            raise HorizonExceeded(f"prefix {n} beyond horizon {self.horizon}")
        with self._lock:
            while len(self._bits) < n:
                have = len(self._bits)
                chunk = self._extend(have)
                if not chunk:
                    raise HorizonExceeded(f"stream stalled at {have} (< {n})")
                self._bits.extend(check_word(chunk))
            return "".join(self._bits[:n])

    def __len__(self):
        return self.horizon


def iter_words(n: int) -> Iterator[Word]:
    """All words of length n in lexicographic order."""
    for k in range(1 << n):
        yield format(k, f"0{n}b") if n else ""
