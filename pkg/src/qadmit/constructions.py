"""Products, hyperspaces, Lipschitz extension and the function-space code.

Everything here works over finite stand-ins: names are finite words,
spaces are :class:`~qadmit.entropy.FiniteMetricSpace` values, and reals are
exact fractions.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .cantor import Word, bin_to_nat, nat_to_bin, pair, round_half_toward_zero, unpair
from .entropy import FiniteMetricSpace, NotConnectedAtScale, hausdorff_distance
from .moduli import GrowthFn, compose, from_fn, identity, lower_semi_inverse
from .reps import InsufficientInput, PointRep, Rep
from .unit_interval import approx_to_signed_word


class ScheduleInconsistent(ValueError):
    pass


class InconsistentBits(ValueError):
    pass


class NotLipschitzOnZ(ValueError):
    pass


class DeltaOutOfRange(ValueError):
    pass


class NetLookupFailed(LookupError):
    pass


class DomainMismatch(TypeError):
    pass


def _pow2(k: int) -> Fraction:
    return Fraction(1, 1 << k) if k >= 0 else Fraction(1 << -k)


# realizers

@dataclass(frozen=True)
class Realizer:
    """Monotone prefix transformer with a claimed modulus: an output prefix
    of length n is produced from any input prefix of length modulus(n)."""

    fn: Callable[[Word], Word]
    modulus: GrowthFn | None = None
    source: str = ""
    target: str = ""
    name: str = "realizer"

    def __call__(self, w: Word) -> Word:
        return self.fn(w)


def identity_realizer(space: str = "") -> Realizer:
    return Realizer(lambda w: w, identity(), space, space, "id")


def compose_reductions(F: Realizer, G: Realizer) -> Realizer:
    """G after F. Moduli compose as iota(kappa(n)) for F with iota, G with kappa."""
    if F.target and G.source and F.target != G.source:
        raise DomainMismatch(f"{F.name} lands in {F.target!r}, {G.name} reads {G.source!r}")
    if F.name == "id":
        return G
    if G.name == "id":
        return F
    mod = None
    if F.modulus is not None and G.modulus is not None:
        mod = compose(F.modulus, G.modulus)
    return Realizer(lambda w: G.fn(F.fn(w)), mod, F.source, G.target, f"{G.name}∘{F.name}")


def min_input_length(T: Callable[[Word], Word], name: Word, n: int) -> int | None:
    """Least L with len(T(name[:L])) >= n, by bisection (T is monotone)."""
    if len(T(name)) < n:
        return None
    lo, hi = 0, len(name)
    while lo < hi:
        mid = (lo + hi) // 2
        if len(T(name[:mid])) >= n:
            hi = mid
        else:
            lo = mid + 1
    return lo


# a binary representation of the dyadic grid

class GridBinaryRep(PointRep):
    """Binary expansions restricted to the points j/2^k of ``grid(k)``.

    The image of a word v is the grid inside the closed interval
    [v, v + 2^{-|v|}]; the modulus is the identity.
    """

    name = "grid-binary"

    def __init__(self, space: FiniteMetricSpace, k: int):
        if len(space) != (1 << k) + 1:
            raise ValueError(f"expected grid({k}) with {(1 << k) + 1} points")
        self.space = space
        self.k = k
        self.modulus = identity()

    def span(self, v: Word) -> tuple[int, int]:
        L = len(v)
        i = int(v, 2) if v else 0
        lo = -(-(i << self.k) >> L)
        hi = ((i + 1) << self.k) >> L
        return lo, hi

    def image(self, v: Word):
        lo, hi = self.span(v)
        if lo > hi:
            return None
        mask = np.zeros(len(self.space), dtype=bool)
        mask[lo:hi + 1] = True
        return mask

    def spread(self, v):
        lo, hi = self.span(v)
        return None if lo > hi else Fraction(hi - lo, 1 << self.k)

    def valid(self, v):
        lo, hi = self.span(v)
        return lo <= hi

    def lowest(self, v: Word) -> int | None:
        lo, hi = self.span(v)
        return None if lo > hi else lo

    def decode(self, v: Word, n: int) -> int:
        if len(v) < n:
            raise InsufficientInput(f"need {n} bits, have {len(v)}")
        return self.span(v[:n])[0]

    def name_of(self, j: int, length: int) -> Word:
        """A name of point j: k-bit binary of j then zeros (all ones for 1)."""
        if j == 1 << self.k:
            return "1" * length
        head = format(j, f"0{self.k}b") if self.k else ""
        return (head + "0" * max(0, length - self.k))[:length]


# binary product

class BinaryProductRep(Rep):
    """Even bits name the first component, odd bits the second.

    Points are pairs under the maximum metric.
    """

    def __init__(self, left: Rep, right: Rep):
        self.left = left
        self.right = right
        self.name = f"{left.name}x{right.name}"
        kl, kr = left.modulus, right.modulus
        self.modulus = from_fn(lambda n: 2 * max(kl(n), kr(n)), f"2max[{kl.name},{kr.name}]")

    @staticmethod
    def split(w: Word) -> tuple[Word, Word]:
        return w[0::2], w[1::2]

    @staticmethod
    def interleave(x: Word, y: Word) -> Word:
        n = min(len(x), len(y))
        out = "".join(a + b for a, b in zip(x[:n], y[:n]))
        return out + x[n] if len(x) > n else out

    def image(self, w):
        x, y = self.split(w)
        a, b = self.left.image(x), self.right.image(y)
        return None if a is None or b is None else (a, b)

    def spread(self, w):
        x, y = self.split(w)
        a, b = self.left.spread(x), self.right.spread(y)
        return None if a is None or b is None else max(a, b)

    def valid(self, w):
        x, y = self.split(w)
        return self.left.valid(x) and self.right.valid(y)

    def decode(self, w: Word, n: int):
        x, y = self.split(w)
        return self.left.decode(x, n), self.right.decode(y, n)

    def project_left(self) -> Realizer:
        return Realizer(lambda w: w[0::2], from_fn(lambda n: 2 * n, "2n"),
                        self.name, self.left.name, "proj0")

    def project_right(self) -> Realizer:
        return Realizer(lambda w: w[1::2], from_fn(lambda n: 2 * n + 1, "2n+1"),
                        self.name, self.right.name, "proj1")

    def embed_left(self, y: Word) -> Realizer:
        """x -> (x, y) for a fixed name y of the partner."""
        def fn(x):
            k = min(len(x), len(y))
            return self.interleave(x[:k], y[:k])
        return Realizer(fn, from_fn(lambda n: (n + 1) // 2, "ceil(n/2)"),
                        self.left.name, self.name, "emb0")

    def embed_right(self, x: Word) -> Realizer:
        def fn(y):
            k = min(len(y), max(len(x) - 1, 0))
            return self.interleave(x[:k + 1], y[:k])
        return Realizer(fn, from_fn(lambda n: n // 2, "floor(n/2)"),
                        self.right.name, self.name, "emb1")


# countable products over finitely many components

def _component_distance(rep: Rep, a, b) -> Fraction:
    space = getattr(rep, "space", None)
    if space is not None:
        return space.dist(a, b)
    return abs(Fraction(a) - Fraction(b))


def product_distance(reps: Sequence[Rep], xs: Sequence, ys: Sequence) -> Fraction:
    """sup_j 2^{-j} d_j; a None coordinate stands for 'any point' and is
    charged the full scaled diameter bound 2^{-j}."""
    out = Fraction(0)
    for j, (rep, a, b) in enumerate(zip(reps, xs, ys)):
        d = Fraction(1) if a is None or b is None else _component_distance(rep, a, b)
        out = max(out, d * _pow2(j))
    return out


def _decode_or_none(rep: Rep, bits: Word, n: int):
    if n <= 0:
        return None
    try:
        return rep.decode(bits, n)
    except InsufficientInput:
        return None


class NaiveProductRep(Rep):
    """Bit i of component j sits at stream position pair(j, i).

    Kept as the non-linear baseline; the modulus is
    n -> max_{j<n} pair(j, kappa_j(n - j)).
    """

    def __init__(self, reps: Sequence[Rep]):
        self.reps = list(reps)
        self.name = "naive[" + ",".join(r.name for r in self.reps) + "]"
        J = len(self.reps)

        def kappa(n):
            return max((pair(j, self.reps[j].modulus(n - j)) for j in range(min(n, J))), default=0)
        self.modulus = from_fn(kappa, "naive-product")

    def component(self, w: Word, j: int) -> Word:
        out = []
        i = 0
        while (p := pair(j, i)) < len(w):
            out.append(w[p])
            i += 1
        return "".join(out)

    def encode_word(self, names: Sequence[Word], length: int) -> Word:
        out = []
        for p in range(length):
            j, i = unpair(p)
            if j >= len(names):
                out.append("0")
                continue
            if i >= len(names[j]):
                raise InsufficientInput(f"component {j} name shorter than {i + 1}")
            out.append(names[j][i])
        return "".join(out)

    def decode(self, w: Word, n: int) -> list:
        return [_decode_or_none(r, self.component(w, j), n - j) for j, r in enumerate(self.reps)]

    def image(self, w):
        ims = [r.image(self.component(w, j)) for j, r in enumerate(self.reps)]
        return None if any(im is None for im in ims) else ims

    def spread(self, w):
        out = Fraction(0)
        for j, r in enumerate(self.reps):
            s = r.spread(self.component(w, j))
            if s is None:
                return None
            out = max(out, s * _pow2(j))
        return out


@dataclass
class ProductSchedule:
    """Round-robin layout: round n carries, for each j < n, the bits
    kappa_j(n-j-1) .. kappa_j(n-j) of component j."""

    kappas: list[GrowthFn]
    depth: int
    positions: list[tuple[int, int]] = field(default_factory=list)
    round_ends: list[int] = field(default_factory=list)

    def __post_init__(self):
        for j, k in enumerate(self.kappas):
            if k(0) != 0:
                raise ScheduleInconsistent(f"component {j}: kappa(0) = {k(0)}, expected 0")
        self.positions = []
        self.round_ends = [0]
        for n in range(1, self.depth + 1):
            for j in range(min(n, len(self.kappas))):
                k = self.kappas[j]
                self.positions.extend((j, i) for i in range(k(n - j - 1), k(n - j)))
            self.round_ends.append(len(self.positions))

    @classmethod
    def normalized(cls, kappas: Sequence[GrowthFn], depth: int) -> "ProductSchedule":
        """Same schedule after forcing kappa_j(0) = 0."""
        fixed = [k if k(0) == 0 else from_fn(lambda n, k=k: k(n) if n else 0, f"{k.name}|0")
                 for k in kappas]
        return cls(fixed, depth)

    def kappa(self, n: int) -> int:
        """Sum_{j < n} kappa_j(n - j) over the available components."""
        return sum(self.kappas[j](n - j) for j in range(min(n, len(self.kappas))))

    def verify(self) -> list[str]:
        """Problems found in the position table (empty when it is a bijection
        onto the component prefixes and the high-water marks match)."""
        problems = []
        seen: dict[tuple[int, int], int] = {}
        for p, key in enumerate(self.positions):
            if key in seen:
                problems.append(f"positions {seen[key]} and {p} both carry {key}")
            seen[key] = p
        for j, k in enumerate(self.kappas):
            want = k(max(self.depth - j, 0))
            got = sorted(i for (jj, i) in seen if jj == j)
            if got != list(range(want)):
                problems.append(f"component {j}: carries {len(got)} bits, expected 0..{want - 1}")
        for n, end in enumerate(self.round_ends):
            if end != self.kappa(n):
                problems.append(f"round {n}: high-water {end} != kappa({n}) = {self.kappa(n)}")
        return problems

    def locate(self, j: int, i: int) -> int:
        for p, key in enumerate(self.positions):
            if key == (j, i):
                return p
        raise KeyError((j, i))

    def to_json(self) -> str:
        return json.dumps({"depth": self.depth,
                           "kappas": [k.name for k in self.kappas],
                           "round_ends": self.round_ends,
                           "positions": [list(p) for p in self.positions]})


class ScheduledProductRep(Rep):
    """Product of finitely many components laid out by a ProductSchedule.

    Points are tuples under sup_j 2^{-j} d_j.
    """

    def __init__(self, reps: Sequence[Rep], depth: int, normalize: bool = False):
        self.reps = list(reps)
        kappas = [r.modulus for r in self.reps]
        self.schedule = (ProductSchedule.normalized(kappas, depth) if normalize
                         else ProductSchedule(kappas, depth))
        self.depth = depth
        self.name = "prod[" + ",".join(r.name for r in self.reps) + "]"
        self.modulus = from_fn(self.schedule.kappa, "sum kappa_j(n-j)")

    def rounds_in(self, length: int) -> int:
        ends = self.schedule.round_ends
        r = 0
        while r + 1 < len(ends) and ends[r + 1] <= length:
            r += 1
        return r

    def components(self, w: Word) -> list[Word]:
        out = [[] for _ in self.reps]
        for p, c in enumerate(w[:self.schedule.round_ends[-1]]):
            j, _ = self.schedule.positions[p]
            out[j].append(c)
        return ["".join(b) for b in out]

    def encode_word(self, names: Sequence[Word], rounds: int | None = None) -> Word:
        rounds = self.depth if rounds is None else rounds
        if rounds > self.depth:
            raise InsufficientInput(f"schedule built to depth {self.depth}")
        out = []
        for j, i in self.schedule.positions[:self.schedule.round_ends[rounds]]:
            if i >= len(names[j]):
                raise InsufficientInput(f"component {j} name shorter than {i + 1}")
            out.append(names[j][i])
        return "".join(out)

    def decode(self, w: Word, n: int) -> list:
        if len(w) < self.schedule.kappa(n):
            raise InsufficientInput(f"need {self.schedule.kappa(n)} bits, have {len(w)}")
        comps = self.components(w)
        return [_decode_or_none(r, comps[j], n - j) for j, r in enumerate(self.reps)]

    def image(self, w):
        comps = self.components(w)
        ims = [r.image(comps[j]) for j, r in enumerate(self.reps)]
        return None if any(im is None for im in ims) else ims

    def spread(self, w):
        comps = self.components(w)
        out = Fraction(0)
        for j, r in enumerate(self.reps):
            s = r.spread(comps[j])
            if s is None:
                return None
            out = max(out, s * _pow2(j))
        return out

    def project(self, j: int) -> Realizer:
        """Round-granular projection: emits the bits of component j carried
        by the complete rounds of the input."""
        kj = self.schedule.kappas[j]

        def fn(w):
            r = self.rounds_in(len(w))
            return self.components(w[:self.schedule.round_ends[r]])[j]

        kappa = self.schedule.kappa
        loinv = lower_semi_inverse(kj)
        mod = from_fn(lambda m: kappa(loinv(m) + j), f"kappa(loinv(kappa_{j})+{j})")
        return Realizer(fn, mod, self.name, self.reps[j].name, f"proj{j}")

    def embed(self, j: int, others: Sequence[Word]) -> Realizer:
        """Component j varies; the other names are fixed inputs."""
        kj = self.schedule.kappas[j]

        def fn(x):
            r = 0
            while r < self.depth and kj(max(0, r + 1 - j)) <= len(x):
                r += 1
            names = list(others)
            names[j] = x
            return self.encode_word(names, r)

        loinv = lower_semi_inverse(from_fn(self.schedule.kappa, "kappa"))
        mod = from_fn(lambda m: kj(max(0, loinv(m) - j)), f"kappa_{j}(loinv(kappa)-{j})")
        return Realizer(fn, mod, self.reps[j].name, self.name, f"emb{j}")


def binary_product(xi: Rep, upsilon: Rep) -> BinaryProductRep:
    return BinaryProductRep(xi, upsilon)


def naive_countable_product(reps: Sequence[Rep]) -> NaiveProductRep:
    return NaiveProductRep(reps)


def scheduled_countable_product(reps: Sequence[Rep], depth: int,
                                normalize: bool = False) -> tuple[ScheduledProductRep, ProductSchedule]:
    rep = ScheduledProductRep(reps, depth, normalize)
    return rep, rep.schedule


# hyperspace of compact subsets

class HyperspaceRep(Rep):
    """Names of subsets of a finite space, one bit per word v at index bin(v).

    The base representation must be a PointRep. With ``two_sided`` the
    encoder answers the ball test at the word's own level
    ell(v) = min{n : |v| < mu(n)}: bit 1 iff the image of v meets the closed
    2^{-ell-1}-neighbourhood of A. By default it answers the exact test
    (bit 1 iff the image of v meets A), the limit of the same test as the
    probing level grows.
    """

    def __init__(self, base: PointRep, two_sided: bool = False):
        self.base = base
        self.space = base.space
        self.mu = base.modulus
        self.two_sided = two_sided
        self.name = f"2^{base.name}"
        self.modulus = from_fn(lambda m: (1 << (self.mu(m) + 1)) - 1, "2^(mu+1)-1")

    def level(self, length: int) -> int:
        n = 0
        while self.mu(n) <= length:
            n += 1
        return n

    def _near(self, A: Sequence[int], r: Fraction) -> np.ndarray:
        out = np.zeros(len(self.space), dtype=bool)
        for a in A:
            out |= self.space.ball_row(int(a), r)
        return out

    def encode_word(self, A: Sequence[int], max_len: int) -> Word:
        """Bits for every word of length <= max_len (2^{max_len+1}-1 bits)."""
        if not len(A):
            raise ValueError("empty set")
        exact = np.zeros(len(self.space), dtype=bool)
        exact[list(A)] = True
        near_cache: dict[int, np.ndarray] = {}
        bits = []
        for idx in range((1 << (max_len + 1)) - 1):
            v = nat_to_bin(idx)
            im = self.base.image(v)
            if im is None:
                bits.append("0")
                continue
            if self.two_sided:
                ell = self.level(len(v))
                if ell not in near_cache:
                    near_cache[ell] = self._near(A, _pow2(ell + 1))
                target = near_cache[ell]
            else:
                target = exact
            bits.append("1" if (im & target).any() else "0")
        return "".join(bits)

    def encode(self, A: Sequence[int], n: int) -> Word:
        """Enough of the name to decode at precision n."""
        return self.encode_word(A, self.mu(n))

    def check(self, w: Word) -> None:
        """InconsistentBits when a 1 sits below a 0: the parent's image
        contains the child's, so both clauses cannot hold."""
        for idx in range(len(w)):
            v = nat_to_bin(idx)
            if v and w[idx] == "1":
                p = bin_to_nat(v[:-1])
                if w[p] == "0" and self.base.valid(v):
                    raise InconsistentBits(f"word {v!r} has bit 1 under parent bit 0")

    def decode(self, w: Word, n: int) -> list[int]:
        """Lowest point of the image of every word of length mu(n) with bit 1."""
        L = self.mu(n)
        start = (1 << L) - 1
        if len(w) < (1 << (L + 1)) - 1:
            raise InsufficientInput(f"need {(1 << (L + 1)) - 1} bits, have {len(w)}")
        out = set()
        for idx in range(start, (1 << (L + 1)) - 1):
            if w[idx] != "1":
                continue
            im = self.base.image(nat_to_bin(idx))
            if im is not None:
                out.add(int(np.argmax(im)))
        if not out:
            raise InconsistentBits(f"no word of length {L} carries a 1")
        return sorted(out)

    def image(self, w):
        raise NotImplementedError("hyperspace images are certified by perturbation")

    def clause_violations(self, A: Sequence[int], w: Word) -> list[tuple[Word, int]]:
        """Words whose bit breaks the two-sided ball test at their own level."""
        bad = []
        for idx in range(len(w)):
            v = nat_to_bin(idx)
            im = self.base.image(v)
            if im is None:
                continue
            ell = self.level(len(v))
            if w[idx] == "1" and not (im & self._near(A, _pow2(ell))).any():
                bad.append((v, 1))
            if w[idx] == "0" and (im & self._near(A, _pow2(ell + 1))).any():
                bad.append((v, 0))
        return bad

    def hausdorff(self, A, B) -> Fraction:
        return hausdorff_distance(A, B, self.space)


def hyperspace_rep(base: PointRep, two_sided: bool = False) -> HyperspaceRep:
    return HyperspaceRep(base, two_sided)


# McShane-Whitney extension

@dataclass(frozen=True)
class Extension:
    low: list[Fraction]
    mid: list[Fraction]
    high: list[Fraction]


def _check_lipschitz(S: FiniteMetricSpace, Z: Sequence[int], f: Sequence[Fraction], L: Fraction) -> None:
    for a in range(len(Z)):
        for b in range(a):
            if abs(f[a] - f[b]) > L * S.dist(Z[a], Z[b]):
                raise NotLipschitzOnZ(f"|f({Z[a]}) - f({Z[b]})| = {abs(f[a] - f[b])} "
                                      f"> {L} * {S.dist(Z[a], Z[b])}")


def mcshane_whitney(Z: Sequence[int], f: Sequence, L, S: FiniteMetricSpace,
                    validate: bool = True) -> Extension:
    """Least, greatest and averaged L-Lipschitz extensions of f from Z to S."""
    if len(Z) != len(f) or not len(Z):
        raise ValueError("Z and f must be non-empty and of equal length")
    L = Fraction(L)
    f = [Fraction(v) for v in f]
    if validate:
        _check_lipschitz(S, Z, f, L)
    low, high, mid = [], [], []
    for x in range(len(S)):
        ds = [S.dist(z, x) for z in Z]
        lo = max(v - L * d for v, d in zip(f, ds))
        hi = min(v + L * d for v, d in zip(f, ds))
        low.append(lo)
        high.append(hi)
        mid.append((lo + hi) / 2)
    return Extension(low, mid, high)


def distance_to_set(S: FiniteMetricSpace, Z: Sequence[int]) -> list[Fraction]:
    return [min(S.dist(z, x) for z in Z) for x in range(len(S))]


# the Lipschitz function-space code

DELTA_BITS = 4
DELTA_MAX = 6


@dataclass
class NetLevel:
    n: int
    centers: list[int]            # net points, BFS order; centers[0] is the root
    parent: list[int]             # index into centers, -1 for the root
    word_center: dict[Word, int]  # chosen centre x_w for every domain word of length kappa(n)

    def __post_init__(self):
        self.parent_array = np.array(self.parent, dtype=np.int64)
        self._paths: dict[int, np.ndarray] = {}
        self.index = {c: m for m, c in enumerate(self.centers)}

    @property
    def size(self) -> int:
        return len(self.centers)

    @property
    def code_len(self) -> int:
        return self.n + 1 + DELTA_BITS * (self.size - 1)

    def path(self, m: int) -> np.ndarray:
        """Tree path root -> node m, as node indices."""
        p = self._paths.get(m)
        if p is None:
            out = []
            k = m
            while k >= 0:
                out.append(k)
                k = self.parent[k]
            p = self._paths[m] = np.array(out[::-1], dtype=np.int64)
        return p


class LipschitzNets:
    """Levels 0..n_max of nets, graphs and spanning trees over a base rep.

    x_w is the lowest point of the image of w; nets keep the first centre
    of every pair within 2^{-n} in lexicographic order of the words; edges
    join centres closer than 2^{-n+2}; trees are breadth-first from the
    least centre.
    """

    def __init__(self, base: PointRep, n_max: int):
        self.base = base
        self.space = base.space
        self.kappa = base.modulus
        self.n_max = n_max
        self.levels = [self._build(n) for n in range(n_max + 1)]

    def _center(self, w: Word) -> int:
        low = getattr(self.base, "lowest", None)
        return low(w) if low is not None else int(np.argmax(self.base.image(w)))

    def _build(self, n: int) -> NetLevel:
        S = self.space
        word_center = {}
        order = []
        seen = set()
        for w in self.base.iter_prefixes(self.kappa(n)):
            c = self._center(w)
            word_center[w] = c
            if c not in seen:
                seen.add(c)
                order.append(c)
        covered = np.zeros(len(S), dtype=bool)
        kept = []
        r = _pow2(n)
        for c in order:
            if not covered[c]:
                kept.append(c)
                covered[S.ball_indices(c, r)] = True
        kept.sort()
        is_kept = np.zeros(len(S), dtype=bool)
        is_kept[kept] = True
        near = _pow2(n - 2)
        root = kept[0]
        centers, parent = [root], [-1]
        where = {root: 0}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in S.ball_indices(u, near):
                v = int(v)
                if is_kept[v] and v not in where and S.dist(u, v) < near:
                    where[v] = len(centers)
                    centers.append(v)
                    parent.append(where[u])
                    queue.append(v)
        if len(centers) != len(kept):
            raise NotConnectedAtScale(f"level {n}: net graph has {len(kept) - len(centers)} unreachable centres")
        return NetLevel(n, centers, parent, word_center)

    def level(self, n: int) -> NetLevel:
        if not 0 <= n <= self.n_max:
            raise InsufficientInput(f"nets built to level {self.n_max}, asked {n}")
        return self.levels[n]

    def prefix_length(self, n: int) -> int:
        """Bits holding the codes of levels 0..n."""
        return sum(self.levels[k].code_len for k in range(n + 1))

    def to_json(self) -> str:
        return json.dumps({"levels": [{"n": L.n, "centers": L.centers, "parent": L.parent,
                                       "code_len": L.code_len} for L in self.levels]})


def _numerators(f: Sequence) -> tuple[np.ndarray, int] | None:
    """Common dyadic numerators of f when they fit int64, else None."""
    if isinstance(f, DyadicTable):
        return (f.nums, f.D) if (f.nums >= 0).all() else None
    fr = [Fraction(v) for v in f]
    D = max((v.denominator.bit_length() - 1 for v in fr), default=0)
    if any(v.denominator & (v.denominator - 1) or v < 0 for v in fr) or D > 40:
        return None
    return np.array([v.numerator << (D - (v.denominator.bit_length() - 1)) for v in fr],
                    dtype=np.int64), D


def rounded_values(f: Sequence, level: NetLevel, nums=None) -> np.ndarray:
    """2^n f'_n on the centres (nearest integer, ties towards zero)."""
    n = level.n
    nums = _numerators(f) if nums is None else nums
    if nums is None or nums[1] + n > 62:
        return np.array([round_half_toward_zero(Fraction(f[c]) * (1 << n)) for c in level.centers],
                        dtype=object)
    arr, D = nums
    x = arr[level.centers] << n
    q, rem = x >> D, x & ((1 << D) - 1)
    return q + (2 * rem > (1 << D))


_DELTA_WORDS = [format(d + DELTA_MAX, f"0{DELTA_BITS}b") for d in range(-DELTA_MAX, DELTA_MAX + 1)]
_WEIGHTS = np.array([1 << (DELTA_BITS - 1 - i) for i in range(DELTA_BITS)], dtype=np.int64)


def encode_level(vals: Sequence[int], level: NetLevel) -> Word:
    n = level.n
    vals = np.asarray(vals)
    if not 0 <= vals[0] <= 1 << n:
        raise ValueError(f"root value {vals[0]} outside 0..2^{n}")
    deltas = vals[1:] - vals[level.parent_array[1:]] if level.size > 1 else vals[:0]
    bad = np.flatnonzero(np.abs(deltas) > DELTA_MAX)
    if bad.size:
        m = int(bad[0]) + 1
        raise DeltaOutOfRange(f"level {n}, node {m}: delta {deltas[m - 1]} * 2^-{n}")
    return format(int(vals[0]), f"0{n + 1}b") + "".join(_DELTA_WORDS[int(d) + DELTA_MAX] for d in deltas)


def _level_deltas(seg: Word, level: NetLevel) -> np.ndarray:
    body = np.frombuffer(seg[level.n + 1:level.code_len].encode(), dtype=np.uint8) - 48
    d = body.reshape(-1, DELTA_BITS).astype(np.int64) @ _WEIGHTS - DELTA_MAX
    if d.size and np.abs(d).max() > DELTA_MAX:
        m = int(np.argmax(np.abs(d) > DELTA_MAX)) + 1
        raise DeltaOutOfRange(f"level {level.n}, node {m}: stored delta {d[m - 1]}")
    return d


def decode_level(code: Word, level: NetLevel) -> list[int]:
    n = level.n
    if len(code) < level.code_len:
        raise InsufficientInput(f"level {n} needs {level.code_len} bits")
    d = _level_deltas(code, level)
    vals = [int(code[:n + 1], 2)]
    for m in range(1, level.size):
        vals.append(vals[level.parent[m]] + int(d[m - 1]))
    return vals


def _check_one_lipschitz(f: Sequence[Fraction], nets: LipschitzNets, n: int) -> None:
    S = nets.space
    cs = nets.level(n).centers
    for a in range(len(cs)):
        for b in range(a):
            if abs(Fraction(f[cs[a]]) - Fraction(f[cs[b]])) > S.dist(cs[a], cs[b]):
                raise NotLipschitzOnZ(f"f is not 1-Lipschitz on the level-{n} net")


def lipschitz_encode(f: Sequence, nets: LipschitzNets, n: int | None = None,
                     validate: bool = False) -> Word:
    """Codes u_0 .. u_n of f (values on all points of the space)."""
    n = nets.n_max if n is None else n
    nums = _numerators(f)
    out = []
    for k in range(n + 1):
        if validate:
            _check_one_lipschitz(f, nets, k)
        lev = nets.level(k)
        out.append(encode_level(rounded_values(f, lev, nums), lev))
    return "".join(out)


def lipschitz_decode(code: Word, nets: LipschitzNets, n: int) -> dict[int, Fraction]:
    """f_n on the level-n net, as {point: value}."""
    start = nets.prefix_length(n - 1) if n > 0 else 0
    lev = nets.level(n)
    vals = decode_level(code[start:], lev)
    return {c: Fraction(v, 1 << n) for c, v in zip(lev.centers, vals)}


def application_value(code: Word, x_name: Word, nets: LipschitzNets, n: int) -> Fraction:
    """y_n with |y_n - f(x)| <= 2^{-n+3}."""
    lev = nets.level(n)
    k = nets.kappa(n)
    if len(x_name) < k:
        raise InsufficientInput(f"point name needs {k} bits")
    v = x_name[:k]
    xv = lev.word_center.get(v)
    if xv is None:
        raise NetLookupFailed(f"{v!r} is not a domain word at level {n}")
    S = nets.space
    r = _pow2(n - 1)
    hits = [lev.index[int(c)] for c in S.ball_indices(xv, r) if int(c) in lev.index]
    M = min(hits, default=None)
    if M is None:
        raise NetLookupFailed(f"no level-{n} net point within 2^-{n - 1} of {xv}")
    start = nets.prefix_length(n - 1) if n > 0 else 0
    seg = code[start:start + lev.code_len]
    if len(seg) < lev.code_len:
        raise InsufficientInput(f"code needs {start + lev.code_len} bits")
    acc = int(seg[:n + 1], 2)
    path = lev.path(M)[1:]
    if path.size:
        acc += int(_level_deltas(seg, lev)[path - 1].sum())
    return Fraction(acc, 1 << n)


def application_values(code: Word, x_name: Word, nets: LipschitzNets, upto: int) -> list[Fraction]:
    return [application_value(code, x_name, nets, m) for m in range(upto + 1)]


def application_realizer(code: Word, x_name: Word, nets: LipschitzNets, n: int) -> Fraction:
    return application_value(code, x_name, nets, n)


def application_signed(code: Word, x_name: Word, nets: LipschitzNets, digits: int) -> Word:
    """Signed-digit name of f(x) with ``digits`` digits (reads y_0 .. y_{digits+6})."""
    return signed_from_values(application_values(code, x_name, nets, digits + 6), digits)


def signed_from_values(ys: Sequence[Fraction], digits: int) -> Word:
    """Signed-digit name from y_0 .. y_{digits+6} with |y_m - x| <= 2^{-m+3}."""
    return approx_to_signed_word(ys)[:2 * digits]


def application_modulus(nets: LipschitzNets) -> GrowthFn:
    """Interleaved-input bound max{2 kappa(n+3), 2 kappa'_1(n+3)}."""
    return from_fn(lambda n: max(2 * nets.kappa(n + 3), 2 * nets.prefix_length(n + 3)),
                   "max{2kappa(n+3),2kappa'(n+3)}")


def code_count_bound(n: int, N: int) -> int:
    return (1 + (1 << n)) * 13 ** (N - 1)


def count_level_codes(level: NetLevel, S: FiniteMetricSpace) -> tuple[int, int]:
    """(#codes, #rounded-1-Lipschitz value tables) on a level's net.

    Codes are roots in 0..2^n with deltas in the 13-value window keeping all
    values in range; tables are maps into D_n with |g(x) - g(y)| <= d + 2^{-n}.
    Enumeration; keep nets tiny.
    """
    n = level.n
    top = 1 << n
    codes = 0
    tables = 0

    def rec(m, vals):
        nonlocal codes, tables
        if m == level.size:
            codes += 1
            ok = all(abs(vals[a] - vals[b]) <= S.dist(level.centers[a], level.centers[b]) * top + 1
                     for a in range(level.size) for b in range(a))
            tables += ok
            return
        base = vals[level.parent[m]]
        for d in range(-DELTA_MAX, DELTA_MAX + 1):
            if 0 <= base + d <= top:
                rec(m + 1, vals + [base + d])

    for root in range(top + 1):
        rec(1, [root])
    return codes, tables


def lip1_net_functions(S: FiniteMetricSpace, net: Sequence[int], n: int) -> tuple[int, Fraction]:
    """Number of maps net -> {0, 2^{-n}} and the least sup distance between
    the 1-Lipschitz midpoint extensions of two distinct ones."""
    N = len(net)
    h = _pow2(n)
    exts = []
    for mask in range(1 << N):
        vals = [h if mask >> i & 1 else Fraction(0) for i in range(N)]
        exts.append(mcshane_whitney(net, vals, 1, S, validate=False).mid)
    least = min((max(abs(a - b) for a, b in zip(exts[i], exts[j]))
                 for i in range(len(exts)) for j in range(i)), default=Fraction(0))
    return len(exts), least


# random 1-Lipschitz functions on the grid

@dataclass(frozen=True)
class DyadicTable:
    """Values nums[i] / 2^D, indexable like a list of fractions."""

    nums: np.ndarray
    D: int

    def __len__(self):
        return len(self.nums)

    def __getitem__(self, i) -> Fraction:
        return Fraction(int(self.nums[i]), 1 << self.D)

    def __iter__(self):
        return (Fraction(int(v), 1 << self.D) for v in self.nums)


def random_lipschitz_on_grid(rng, k: int, pieces: int = 6) -> DyadicTable:
    """Piecewise-linear 1-Lipschitz values on the points j/2^k, clipped into
    [0;1]; slopes are multiples of 1/4."""
    N = (1 << k) + 1
    D = k + 2
    cuts = sorted(rng.sample(range(1, N - 1), min(pieces - 1, N - 2)))
    slopes = np.array([rng.randint(-4, 4) for _ in range(len(cuts) + 1)], dtype=np.int64)
    seg = np.searchsorted(np.array(cuts, dtype=np.int64), np.arange(1, N), side="left")
    steps = slopes[seg]
    start = rng.randint(0, 1 << k) << 2
    nums = np.concatenate([[start], start + np.cumsum(steps)])
    return DyadicTable(np.clip(nums, 0, 1 << D), D)
