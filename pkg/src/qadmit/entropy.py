"""Covering numbers, capacities and entropy profiles of finite metric spaces.

Distances are dyadic and stored as integer numerators over a common 2^K,
so every threshold test is an exact integer comparison. Larger spaces
(products) compute rows of their ball relation on demand instead of
holding an N x N matrix.
"""
from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .cantor import format_dyadic, iter_words, parse_dyadic

DEFAULT_EXACT_LIMIT = 24
DEFAULT_SIZE_CAP = 1 << 15


class MetricValidationError(ValueError):
    pass


class ResolutionExceeded(ValueError):
    pass


class SizeCapExceeded(ValueError):
    pass


class NotConnectedAtScale(ValueError):
    pass


class EmptySet(ValueError):
    pass


def ceil_log2(k: int) -> int:
    if k < 1:
        raise ValueError("ceil_log2 of a non-positive count")
    return (k - 1).bit_length()


def _dyadic_exponent(x: Fraction) -> int:
    d = Fraction(x).denominator
    if d & (d - 1):
        raise MetricValidationError(f"distance {x} is not dyadic")
    return d.bit_length() - 1


# spaces

class FiniteMetricSpace:
    """Abstract finite metric space; subclasses supply ``ball_row``."""

    labels: list

    def __len__(self) -> int:
        return len(self.labels)

    def dist(self, i: int, j: int) -> Fraction:
        raise NotImplementedError

    def ball_row(self, i: int, r: Fraction) -> np.ndarray:
        """Boolean mask of the points at distance <= r from point i."""
        raise NotImplementedError

    def ball_indices(self, i: int, r: Fraction) -> np.ndarray:
        return np.flatnonzero(self.ball_row(i, r))

    def conflict_row(self, i: int, r: Fraction) -> np.ndarray:
        """Points sharing some closed r-ball (centred in the space) with i."""
        ball = np.flatnonzero(self.ball_row(i, r))
        out = np.zeros(len(self), dtype=bool)
        for c in ball:
            out |= self.ball_row(int(c), r)
        return out

    @property
    def diameter(self) -> Fraction:
        return max((self.dist(i, j) for i in range(len(self)) for j in range(i + 1, len(self))),
                   default=Fraction(0))

    def min_positive_distance(self) -> Fraction | None:
        best = None
        for i in range(len(self)):
            for j in range(i + 1, len(self)):
                d = self.dist(i, j)
                if d > 0 and (best is None or d < best):
                    best = d
        return best

    def ball_matrix(self, r: Fraction) -> np.ndarray:
        return np.array([self.ball_row(i, r) for i in range(len(self))], dtype=bool)


class LineGrid(FiniteMetricSpace):
    """The points j/2^k of [0;1] without a stored distance matrix."""

    def __init__(self, k: int):
        self.k = k
        self.labels = [Fraction(j, 1 << k) for j in range((1 << k) + 1)]

    def dist(self, i, j):
        return Fraction(abs(i - j), 1 << self.k)

    def _reach(self, r: Fraction) -> int:
        return math.floor(Fraction(r) * (1 << self.k))

    def ball_indices(self, i: int, r: Fraction) -> np.ndarray:
        t = self._reach(r)
        return np.arange(max(i - t, 0), min(i + t, len(self) - 1) + 1)

    def ball_row(self, i, r):
        out = np.zeros(len(self), dtype=bool)
        out[self.ball_indices(i, r)] = True
        return out

    def conflict_row(self, i, r):
        t = 2 * self._reach(r)
        out = np.zeros(len(self), dtype=bool)
        out[max(i - t, 0):i + t + 1] = True
        return out

    @property
    def diameter(self):
        return Fraction(1)

    def min_positive_distance(self):
        return Fraction(1, 1 << self.k)


class DenseSpace(FiniteMetricSpace):
    """Distance matrix num / 2^K with integer numerators."""

    def __init__(self, labels: Sequence, num: np.ndarray, K: int, validate: bool = True):
        self.labels = list(labels)
        self.num = num
        self.K = K
        if validate:
            validate_metric(self)
        self._balls: dict[Fraction, np.ndarray] = {}

    @classmethod
    def from_fractions(cls, labels: Sequence, dist: Sequence[Sequence[Fraction]],
                       validate: bool = True) -> "DenseSpace":
        n = len(labels)
        if len(dist) != n or any(len(row) != n for row in dist):
            raise MetricValidationError(f"distance matrix is not {n}x{n}")
        K = max((_dyadic_exponent(x) for row in dist for x in row), default=0)
        nums = [[int(Fraction(x) * (1 << K)) for x in row] for row in dist]
        big = max((abs(v) for row in nums for v in row), default=0)
        dtype = np.int64 if big < (1 << 62) else object
        return cls(labels, np.array(nums, dtype=dtype).reshape(n, n), K, validate)

    @classmethod
    def from_metric(cls, points: Sequence, metric: Callable[[object, object], Fraction],
                    labels: Sequence | None = None, validate: bool = False) -> "DenseSpace":
        labels = list(points) if labels is None else list(labels)
        dist = [[Fraction(metric(p, q)) for q in points] for p in points]
        return cls.from_fractions(labels, dist, validate)

    def dist(self, i, j):
        return Fraction(int(self.num[i, j]), 1 << self.K)

    def _threshold(self, r: Fraction) -> int:
        return math.floor(Fraction(r) * (1 << self.K))

    def ball_matrix(self, r):
        r = Fraction(r)
        m = self._balls.get(r)
        if m is None:
            m = self.num <= self._threshold(r)
            self._balls[r] = m
        return m

    def ball_row(self, i, r):
        return self.ball_matrix(r)[i]

    def conflict_row(self, i, r):
        B = self.ball_matrix(r)
        return B[B[i]].any(axis=0)

    @property
    def diameter(self):
        return Fraction(int(self.num.max()) if len(self) else 0, 1 << self.K)

    def min_positive_distance(self):
        pos = self.num[self.num > 0]
        return Fraction(int(pos.min()), 1 << self.K) if pos.size else None

    def to_json(self) -> str:
        n = len(self)
        return json.dumps({"labels": [str(x) for x in self.labels],
                           "dist": [[format_dyadic(self.dist(i, j)) for j in range(n)] for i in range(n)]})


class ProductSpace(FiniteMetricSpace):
    """Cartesian product under sup_j d_j / 2^{s_j}; rows built from the factors."""

    def __init__(self, factors: Sequence[FiniteMetricSpace], shifts: Sequence[int] | None = None,
                 size_cap: int = DEFAULT_SIZE_CAP):
        self.factors = list(factors)
        self.shifts = list(shifts) if shifts is not None else [0] * len(self.factors)
        self.sizes = [len(f) for f in self.factors]
        total = math.prod(self.sizes)
        if total > size_cap:
            raise SizeCapExceeded(f"product has {total} points, cap is {size_cap}")
        self._n = total
        self.labels = None  # built lazily; products can be large

    def __len__(self):
        return self._n

    def index(self, i: int) -> tuple[int, ...]:
        return tuple(int(v) for v in np.unravel_index(i, self.sizes))

    def label(self, i: int) -> tuple:
        return tuple(f.labels[k] for f, k in zip(self.factors, self.index(i)))

    def dist(self, i, j):
        a, b = self.index(i), self.index(j)
        return max((f.dist(x, y) / (1 << s) for f, s, x, y in zip(self.factors, self.shifts, a, b)),
                   default=Fraction(0))

    def _combine(self, rows: list[np.ndarray]) -> np.ndarray:
        out = np.ones((), dtype=bool)
        for row in rows:
            out = np.logical_and.outer(out, row) if out.ndim else row.copy()
        return out.reshape(-1) if self.factors else np.ones(1, dtype=bool)

    def ball_row(self, i, r):
        r = Fraction(r)
        idx = self.index(i)
        return self._combine([f.ball_row(k, r * (1 << s)) for f, s, k in zip(self.factors, self.shifts, idx)])

    def conflict_row(self, i, r):
        r = Fraction(r)
        idx = self.index(i)
        return self._combine([f.conflict_row(k, r * (1 << s)) for f, s, k in zip(self.factors, self.shifts, idx)])

    @property
    def diameter(self):
        return max((f.diameter / (1 << s) for f, s in zip(self.factors, self.shifts)), default=Fraction(0))

    def min_positive_distance(self):
        vals = [f.min_positive_distance() for f in self.factors]
        vals = [v / (1 << s) for v, s in zip(vals, self.shifts) if v is not None]
        return min(vals) if vals else None

    def to_dense(self) -> DenseSpace:
        n = len(self)
        return DenseSpace.from_fractions([self.label(i) for i in range(n)],
                                         [[self.dist(i, j) for j in range(n)] for i in range(n)],
                                         validate=False)


class LogRescaledSpace(FiniteMetricSpace):
    """D(x,y) = 1/log2(2/d(x,y)) over a base space with d <= 1.

    D is irrational in general; balls are decided exactly through
    D <= p/q  <=>  d^p <= 2^{p-q}  (from log2(2/d) >= q/p).
    """

    def __init__(self, base: DenseSpace):
        if base.diameter > 1:
            raise ValueError("log rescaling needs diameter <= 1")
        self.base = base
        self.labels = base.labels

    def dist(self, i, j):
        return log_rescaled_distance(self.base.dist(i, j))

    def ball_row(self, i, r):
        r = Fraction(r)
        if r >= 1:
            return np.ones(len(self), dtype=bool)
        if r.numerator == 1:
            return self.base.ball_row(i, Fraction(2) / (Fraction(2) ** r.denominator))
        p, q = r.numerator, r.denominator
        return np.array([self.base.dist(i, j) ** p <= Fraction(2) ** (p - q)
                         for j in range(len(self))], dtype=bool)

    @property
    def diameter(self):
        return log_rescaled_distance(self.base.diameter)

    def min_positive_distance(self):
        d = self.base.min_positive_distance()
        return None if d is None else log_rescaled_distance(d)


def log_rescaled_distance(d: Fraction) -> Fraction | float:
    """Exact when 2/d is a power of two, otherwise a float for display."""
    d = Fraction(d)
    if d == 0:
        return Fraction(0)
    t = 2 / d
    if t.denominator == 1 and t.numerator & (t.numerator - 1) == 0:
        return Fraction(1, t.numerator.bit_length() - 1)
    return 1 / math.log2(t)


def validate_metric(S: DenseSpace) -> None:
    num = S.num
    n = len(S)
    if num.shape != (n, n):
        raise MetricValidationError(f"distance matrix has shape {num.shape}, expected {(n, n)}")
    for i in range(n):
        if num[i, i] != 0:
            raise MetricValidationError(f"d({S.labels[i]},{S.labels[i]}) != 0")
    for i in range(n):
        for j in range(i + 1, n):
            if num[i, j] != num[j, i]:
                raise MetricValidationError(f"asymmetric at ({S.labels[i]},{S.labels[j]})")
            if num[i, j] < 0:
                raise MetricValidationError(f"negative distance at ({S.labels[i]},{S.labels[j]})")
            if num[i, j] == 0:
                raise MetricValidationError(f"distinct points {S.labels[i]},{S.labels[j]} at distance 0")
    # d(i,j) <= d(i,k) + d(k,j); report the lexicographically first violation
    for i in range(n):
        via = num[i][:, None] + num  # via[k, j] = d(i,k) + d(k,j)
        bad = via < num[i][None, :]
        if bad.any():
            ks, js = np.nonzero(bad)
            order = np.lexsort((ks, js))
            k, j = int(ks[order[0]]), int(js[order[0]])
            raise MetricValidationError(
                f"triangle inequality fails for ({S.labels[i]},{S.labels[j]},{S.labels[k]}): "
                f"d={S.dist(i, j)} > {S.dist(i, k)} + {S.dist(k, j)}")


def load_space(text: str) -> DenseSpace:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise MetricValidationError(f"invalid JSON: {e}") from None
    if not isinstance(obj, dict) or "labels" not in obj or "dist" not in obj:
        raise MetricValidationError("expected an object with 'labels' and 'dist'")
    try:
        dist = [[parse_dyadic(x) for x in row] for row in obj["dist"]]
    except ValueError as e:
        raise MetricValidationError(str(e)) from None
    return DenseSpace.from_fractions(obj["labels"], dist, validate=True)


# example spaces

def grid(k: int, scale_exp: int = 0) -> DenseSpace:
    """2^k + 1 equally spaced points of [0; 2^{-scale_exp}]."""
    n = (1 << k) + 1
    idx = np.arange(n, dtype=np.int64)
    num = np.abs(idx[:, None] - idx[None, :])
    return DenseSpace([Fraction(i, 1 << (k + scale_exp)) for i in range(n)], num, k + scale_exp, validate=False)


def cantor_truncation(depth: int) -> DenseSpace:
    """All words of the given length under 2^{-first difference}."""
    n = 1 << depth
    idx = np.arange(n, dtype=np.int64)
    x = idx[:, None] ^ idx[None, :]
    # first difference from the left = depth - bit_length(x)
    bl = np.zeros_like(x)
    v = x.copy()
    while v.any():
        bl += v > 0
        v >>= 1
    first = depth - bl
    num = np.where(x == 0, 0, np.left_shift(np.int64(1), (depth - first).astype(np.int64)))
    return DenseSpace(list(iter_words(depth)), num, depth, validate=False)


def hilbert_truncated(depth: int, resolution: Callable[[int], int] | None = None,
                      size_cap: int = DEFAULT_SIZE_CAP) -> ProductSpace:
    """Components j < depth, each a grid of [0;1] scaled by 2^{-j}.

    Component j is a grid with 2^{m_j} + 1 points; the default
    m_j = max(2(depth - j) - 2, depth - j) is fine enough that its covering
    counts (centres on the grid) agree with those of the continuum interval
    at every radius >= 2^{-depth}.
    """
    if resolution is None:
        resolution = lambda j: max(2 * (depth - j) - 2, depth - j)
    return ProductSpace([grid(resolution(j)) for j in range(depth)], list(range(depth)), size_cap)


def product_max(S: FiniteMetricSpace, T: FiniteMetricSpace, size_cap: int = DEFAULT_SIZE_CAP) -> ProductSpace:
    return ProductSpace([S, T], [0, 0], size_cap)


def product_scaled(spaces: Sequence[FiniteMetricSpace], size_cap: int = DEFAULT_SIZE_CAP) -> ProductSpace:
    if any(s.diameter > 1 for s in spaces):
        raise ValueError("scaled product needs every diameter <= 1")
    return ProductSpace(list(spaces), list(range(len(spaces))), size_cap)


def rescale_log(S: DenseSpace) -> LogRescaledSpace:
    return LogRescaledSpace(S)


def random_space(rng: random.Random, npoints: int, dim: int = 2, k: int = 6) -> DenseSpace:
    """Points of a 2^{-k} lattice in [0;1]^dim under the max metric (a genuine metric)."""
    pts = set()
    while len(pts) < npoints:
        pts.add(tuple(rng.randrange((1 << k) + 1) for _ in range(dim)))
    pts = sorted(pts)
    arr = np.array(pts, dtype=np.int64)
    num = np.abs(arr[:, None, :] - arr[None, :, :]).max(axis=2)
    return DenseSpace([tuple(Fraction(c, 1 << k) for c in p) for p in pts], num, k, validate=False)


def random_tree_space(rng: random.Random, npoints: int, k: int = 6, max_edge: int = 8) -> DenseSpace:
    """Shortest-path metric of a random tree with dyadic edge lengths."""
    parent = [None] + [rng.randrange(i) for i in range(1, npoints)]
    w = [0] + [rng.randint(1, max_edge) for _ in range(1, npoints)]
    depth = [0] * npoints
    for i in range(1, npoints):
        depth[i] = depth[parent[i]] + w[i]
    anc = []
    for i in range(npoints):
        path = {}
        v = i
        while v is not None:
            path[v] = depth[v]
            v = parent[v]
        anc.append(path)
    num = np.zeros((npoints, npoints), dtype=np.int64)
    for i in range(npoints):
        for j in range(npoints):
            lca = max((v for v in anc[i] if v in anc[j]), key=lambda v: depth[v])
            num[i, j] = depth[i] + depth[j] - 2 * depth[lca]
    return DenseSpace(list(range(npoints)), num, k, validate=False)


# covering and packing

def _sweep_cover(S: FiniteMetricSpace, r: Fraction) -> list[int]:
    """Lowest uncovered point first; among the centres covering it take the
    one covering most uncovered points (lowest index on ties)."""
    n = len(S)
    uncovered = np.ones(n, dtype=bool)
    centers = []
    dense = isinstance(S, DenseSpace)
    B = S.ball_matrix(r) if dense else None
    while uncovered.any():
        p = int(np.argmax(uncovered))
        cands = np.flatnonzero(B[p] if dense else S.ball_row(p, r))
        if dense:
            gains = (B[cands] & uncovered).sum(axis=1)
        else:
            gains = np.array([(S.ball_row(int(c), r) & uncovered).sum() for c in cands])
        c = int(cands[int(np.argmax(gains))])
        centers.append(c)
        uncovered &= ~(B[c] if dense else S.ball_row(c, r))
    return centers


def _conflict_packing(S: FiniteMetricSpace, r: Fraction) -> list[int]:
    """Greedy set of points no two of which fit in one closed r-ball.

    Its size is a lower bound for the covering number. For points at
    distance > 2r this is automatic, so the bound is at least the usual
    2r-packing bound.
    """
    n = len(S)
    free = np.ones(n, dtype=bool)
    out = []
    while free.any():
        p = int(np.argmax(free))
        out.append(p)
        free &= ~S.conflict_row(p, r)
    return out


def _masks(S: FiniteMetricSpace, r: Fraction) -> list[int]:
    out = []
    for i in range(len(S)):
        row = S.ball_row(i, r)
        out.append(sum(1 << int(j) for j in np.flatnonzero(row)))
    return out


def _exact_cover(masks: list[int], n: int, upper: list[int]) -> list[int]:
    full = (1 << n) - 1
    best = list(upper)
    cover_of = [[c for c in range(n) if (masks[c] >> e) & 1] for e in range(n)]

    def rec(uncov: int, chosen: list[int]):
        nonlocal best
        if not uncov:
            if len(chosen) < len(best):
                best = list(chosen)
            return
        maxgain = max(bin(m & uncov).count("1") for m in masks)
        if len(chosen) + -(-bin(uncov).count("1") // maxgain) >= len(best):
            return
        # element with fewest covering candidates
        e = min((e for e in range(n) if (uncov >> e) & 1), key=lambda e: len(cover_of[e]))
        cands = sorted(cover_of[e], key=lambda c: (-bin(masks[c] & uncov).count("1"), c))
        for c in cands:
            chosen.append(c)
            rec(uncov & ~masks[c], chosen)
            chosen.pop()

    rec(full, [])
    return best


def _exact_independent(adj: list[int], n: int, lower: list[int]) -> list[int]:
    """Maximum set with no two adjacent (adj includes the vertex itself)."""
    best = list(lower)

    def rec(avail: int, chosen: list[int]):
        nonlocal best
        if len(chosen) + bin(avail).count("1") <= len(best):
            return
        if not avail:
            best = list(chosen)
            return
        v = (avail & -avail).bit_length() - 1
        chosen.append(v)
        rec(avail & ~adj[v], chosen)
        chosen.pop()
        rec(avail & ~(1 << v), chosen)

    rec((1 << n) - 1, [])
    return best


@dataclass
class CoverResult:
    lo: int
    hi: int
    centers: list[int]

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    def __iter__(self):
        return iter((self.lo, self.hi, self.centers))


def covering_number(S: FiniteMetricSpace, r, exact_limit: int = DEFAULT_EXACT_LIMIT) -> CoverResult:
    """Least number of closed r-balls centred in S covering S, bracketed.

    Exact by branch and bound up to ``exact_limit`` points; beyond that the
    upper bound is a sweep greedy cover and the lower bound a greedy
    conflict packing.
    """
    r = Fraction(r)
    if r <= 0:
        raise ValueError("radius must be positive")
    n = len(S)
    if n == 0:
        return CoverResult(0, 0, [])
    greedy = _sweep_cover(S, r)
    if n <= exact_limit:
        best = _exact_cover(_masks(S, r), n, greedy)
        return CoverResult(len(best), len(best), sorted(best))
    lo = len(_conflict_packing(S, r))
    return CoverResult(lo, len(greedy), greedy)


def capacity(S: FiniteMetricSpace, r, exact_limit: int = DEFAULT_EXACT_LIMIT) -> CoverResult:
    """Largest set of points with pairwise distance > r, bracketed.

    Above ``exact_limit`` the lower bound is a greedy maximal set and the
    upper bound the greedy cover count at radius r/2.
    """
    r = Fraction(r)
    if r <= 0:
        raise ValueError("radius must be positive")
    n = len(S)
    if n == 0:
        return CoverResult(0, 0, [])
    free = np.ones(n, dtype=bool)
    greedy = []
    while free.any():
        p = int(np.argmax(free))
        greedy.append(p)
        free &= ~S.ball_row(p, r)
    if n <= exact_limit:
        best = _exact_independent(_masks(S, r), n, greedy)
        return CoverResult(len(best), len(best), sorted(best))
    return CoverResult(len(greedy), len(_sweep_cover(S, r / 2)), greedy)


@dataclass
class EntropyProfile:
    ns: list[int]
    covering_lo: list[int]
    covering_hi: list[int]
    capacity_lo: list[int]
    capacity_hi: list[int] = field(default_factory=list)

    def _at(self, n: int) -> int:
        return self.ns.index(n)

    def covering(self, n: int) -> tuple[int, int]:
        i = self._at(n)
        return self.covering_lo[i], self.covering_hi[i]

    def eta(self, n: int) -> tuple[int, int]:
        lo, hi = self.covering(n)
        return ceil_log2(lo), ceil_log2(hi)

    def exact(self, n: int) -> bool:
        lo, hi = self.covering(n)
        return lo == hi

    def sandwich_violations(self) -> list[int]:
        """n with H(n) <= C(n) <= H(n+1) refuted by the computed brackets."""
        bad = []
        for i, n in enumerate(self.ns):
            if self.covering_lo[i] > self.capacity_hi[i]:
                bad.append(n)
            elif i + 1 < len(self.ns) and self.capacity_lo[i] > self.covering_hi[i + 1]:
                bad.append(n)
        return bad

    def as_rows(self) -> list[dict]:
        return [{"n": n, "covering_lo": a, "covering_hi": b, "eta_lo": ceil_log2(a), "eta_hi": ceil_log2(b),
                 "capacity_lo": c, "capacity_hi": d}
                for n, a, b, c, d in zip(self.ns, self.covering_lo, self.covering_hi,
                                         self.capacity_lo, self.capacity_hi)]


def resolution_limit(S: FiniteMetricSpace) -> int:
    """Largest n with 2^{-n} >= the minimal positive distance."""
    mpd = S.min_positive_distance()
    if mpd is None:
        return 0
    n = 0
    while Fraction(1, 1 << (n + 1)) >= mpd:
        n += 1
    return n


def entropy_profile(S: FiniteMetricSpace, n_max: int, exact_limit: int = DEFAULT_EXACT_LIMIT,
                    n_min: int = 0, with_capacity: bool = True) -> EntropyProfile:
    mpd = S.min_positive_distance()
    if mpd is not None and Fraction(1, 1 << n_max) < mpd:
        raise ResolutionExceeded(f"2^-{n_max} is below the minimal distance {mpd}; the profile saturates")
    prof = EntropyProfile([], [], [], [], [])
    for n in range(n_min, n_max + 1):
        r = Fraction(1, 1 << n)
        c = covering_number(S, r, exact_limit)
        prof.ns.append(n)
        prof.covering_lo.append(c.lo)
        prof.covering_hi.append(c.hi)
        if with_capacity:
            k = capacity(S, r, exact_limit)
            prof.capacity_lo.append(k.lo)
            prof.capacity_hi.append(k.hi)
    return prof


# other metric facts

def hausdorff_distance(A: Iterable[int], B: Iterable[int], S: FiniteMetricSpace) -> Fraction:
    A, B = list(A), list(B)
    if not A or not B:
        raise EmptySet("Hausdorff distance needs non-empty sets")
    d1 = max(min(S.dist(a, b) for b in B) for a in A)
    d2 = max(min(S.dist(a, b) for a in A) for b in B)
    return max(d1, d2)


def hyperspace_space(S: FiniteMetricSpace, size_cap: int = 1 << 12) -> DenseSpace:
    """All non-empty subsets of S under the Hausdorff metric."""
    n = len(S)
    if (1 << n) - 1 > size_cap:
        raise SizeCapExceeded(f"{(1 << n) - 1} subsets exceed the cap {size_cap}")
    subsets = [tuple(c) for k in range(1, n + 1) for c in itertools.combinations(range(n), k)]
    return DenseSpace.from_metric(subsets, lambda a, b: hausdorff_distance(a, b, S))


def connected_lower_bound_check(S: FiniteMetricSpace, n: int) -> bool:
    """2^{eta(n)} >= diam * 2^{n-2} for a space connected at scale 2^{-n+1}.

    Centres of a 2^{-n}-cover are linked when their open 2^{-n+1}-balls
    meet in a geodesic ambient, i.e. when they are closer than 2^{-n+2};
    a finite stand-in has no points in between to witness the overlap.
    """
    r = Fraction(1, 1 << n)
    res = covering_number(S, r)
    centers = res.centers
    link = 4 * r
    seen = {centers[0]}
    todo = [centers[0]]
    while todo:
        a = todo.pop()
        for b in centers:
            if b not in seen and S.dist(a, b) < link:
                seen.add(b)
                todo.append(b)
    if len(seen) != len(centers):
        raise NotConnectedAtScale(f"ball graph at scale 2^-{n - 1} leaves {len(centers) - len(seen)} centres unreached")
    return (1 << ceil_log2(res.hi)) >= S.diameter * Fraction(2) ** (n - 2)
