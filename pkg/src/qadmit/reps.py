"""Common interface of representations at desk scale.

A representation is described by what it can say about a finite prefix:
the hull of the values of all names extending it (for spaces of reals) or
the set of points they denote (for finite spaces), together with a claimed
modulus and a decoder. Certification and reductions only use this
interface.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterator

import numpy as np

from .cantor import Word
from .moduli import GrowthFn


class InsufficientInput(LookupError):
    """The prefix at hand is too short to answer the query."""


class Rep:
    """Base class. Subclasses implement :meth:`image` and :meth:`decode`."""

    name = "rep"
    modulus: GrowthFn

    def image(self, prefix: Word):
        """Description of the values of all names extending ``prefix``;
        ``None`` when no name in the domain extends it."""
        raise NotImplementedError

    def spread(self, prefix: Word) -> Fraction | None:
        """Diameter of the image of ``prefix`` (None outside the domain)."""
        raise NotImplementedError

    def decode(self, prefix: Word, n: int):
        raise NotImplementedError

    def valid(self, prefix: Word) -> bool:
        return self.image(prefix) is not None

    def children(self, prefix: Word) -> list[str]:
        return [b for b in "01" if self.valid(prefix + b)]

    def iter_prefixes(self, length: int) -> Iterator[Word]:
        """All domain prefixes of the given length, lexicographically."""
        stack = [""]
        while stack:
            p = stack.pop()
            if len(p) == length:
                yield p
                continue
            for b in reversed(self.children(p)):
                stack.append(p + b)

    def random_prefix(self, rng: random.Random, length: int) -> Word:
        """Uniform random walk through the tree of domain prefixes."""
        p = ""
        while len(p) < length:
            kids = self.children(p)
            if not kids:
                raise RuntimeError(f"{self.name}: dead end at {p!r}")
            p += rng.choice(kids)
        return p


class RealRep(Rep):
    """Representation of (a subset of) [0;1]; images are closed intervals."""

    def image(self, prefix: Word) -> tuple[Fraction, Fraction] | None:
        raise NotImplementedError

    def spread(self, prefix: Word) -> Fraction | None:
        im = self.image(prefix)
        return None if im is None else im[1] - im[0]

    def hull_scan(self, prefix: Word) -> Iterator[tuple[int, Fraction, Fraction]]:
        """(L, lo, hi) for every initial segment prefix[:L], L = 0..len."""
        for L in range(len(prefix) + 1):
            im = self.image(prefix[:L])
            if im is None:
                raise ValueError(f"{self.name}: prefix leaves the domain at bit {L}")
            yield (L,) + tuple(im)

    def midpoint(self, prefix: Word) -> Fraction | None:
        im = self.image(prefix)
        return None if im is None else (im[0] + im[1]) / 2


class PointRep(Rep):
    """Representation of a finite metric space; images are boolean masks."""

    space = None  # a FiniteMetricSpace

    def image(self, prefix: Word):
        raise NotImplementedError

    def spread(self, prefix: Word) -> Fraction | None:
        mask = self.image(prefix)
        if mask is None:
            return None
        return mask_diameter(self.space, mask)


def mask_diameter(space, mask) -> Fraction:
    idx = np.flatnonzero(mask)
    if len(idx) <= 1:
        return Fraction(0)
    num = getattr(space, "num", None)
    if num is not None:
        return Fraction(int(num[np.ix_(idx, idx)].max()), 1 << space.K)
    return max(space.dist(int(i), int(j)) for i in idx for j in idx)
