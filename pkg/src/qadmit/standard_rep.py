"""Standard representations built from covering families.

A covering family fixes, per precision level n, finitely many centres
whose closed 2^{-n-1}-balls cover the space, each addressed by a code of
fixed length (MSB-first binary of the centre's index). A name is the
concatenation of one code per level, or per level phi(0), phi(1), ... for
the subsampled variant, subject to the domain condition that the
addressed centres are pairwise within 2^{-p} + 2^{-q} of each other.

Two families are provided: ``FiniteFamily`` over a finite metric space
(built from greedy covers) and ``IntervalFamily``, the exact dyadic cover
of [0;1] with centres (2a+1)/2^{n+1}.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .cantor import Stream, Word
from .entropy import EntropyProfile, FiniteMetricSpace, ceil_log2, covering_number
from .moduli import GrowthFn, from_fn, identity, table
from .reps import InsufficientInput, PointRep, RealRep, mask_diameter


class CodeLengthOverflow(ValueError):
    pass


class BlockNotInDomain(ValueError):
    pass


class DomainViolation(ValueError):
    pass


class NoCoveringBall(RuntimeError):
    pass


class LevelOutOfRange(ValueError):
    pass


class ConditionUnsatisfiable(ValueError):
    pass


def _pow2(k: int) -> Fraction:
    return Fraction(1, 1 << k)


def code_word(a: int, length: int) -> Word:
    return format(a, f"0{length}b") if length else ""


# families

class FiniteFamily:
    """Covering family over a finite metric space, levels 0..n_max."""

    def __init__(self, space: FiniteMetricSpace, centers: list[list[int]], code_lens: list[int]):
        self.space = space
        self.centers = centers
        self.code_lens = code_lens
        self._where = [{c: k for k, c in enumerate(cs)} for cs in centers]

    @property
    def n_max(self) -> int:
        return len(self.centers) - 1

    def _level(self, n: int) -> None:
        if not 0 <= n <= self.n_max:
            raise LevelOutOfRange(f"level {n} outside 0..{self.n_max}")

    def code_len(self, n: int) -> int:
        self._level(n)
        return self.code_lens[n]

    def count(self, n: int) -> int:
        self._level(n)
        return len(self.centers[n])

    def center(self, n: int, a: int) -> int:
        self._level(n)
        if not 0 <= a < len(self.centers[n]):
            raise BlockNotInDomain(f"code {a} outside dom at level {n}")
        return self.centers[n][a]

    def dist(self, p, q) -> Fraction:
        return self.space.dist(p, q)

    def choose(self, n: int, y: int) -> int:
        """Code of the centre nearest to y in preference order: y itself if it
        is a centre, else the least code whose ball contains y."""
        self._level(n)
        k = self._where[n].get(y)
        if k is not None:
            return k
        r = _pow2(n + 1)
        for k, c in enumerate(self.centers[n]):
            if self.space.dist(c, y) <= r:
                return k
        raise NoCoveringBall(f"point {y} lies in no level-{n} ball")

    # regions: boolean masks over the points
    def full(self):
        return np.ones(len(self.space), dtype=bool)

    def restrict(self, region, n: int, a: int, radius: Fraction):
        return region & self.space.ball_row(self.center(n, a), radius)

    def union(self, regions):
        out = np.zeros(len(self.space), dtype=bool)
        for r in regions:
            out |= r
        return out

    def empty(self, region) -> bool:
        return not region.any()

    def candidates(self, n: int, lo: int, hi: int) -> range:
        return range(lo, min(hi, self.count(n)))

    def to_json(self) -> str:
        return json.dumps({"levels": [{"n": n, "code_len": self.code_lens[n],
                                       "centers": [str(self.space.labels[c]) if self.space.labels else c
                                                   for c in cs],
                                       "center_index": cs}
                                      for n, cs in enumerate(self.centers)]}, sort_keys=True)

    def verify_covering(self) -> list[int]:
        """Levels whose balls fail to cover the space (empty when sound)."""
        bad = []
        for n, cs in enumerate(self.centers):
            r = _pow2(n + 1)
            cov = np.zeros(len(self.space), dtype=bool)
            for c in cs:
                cov |= self.space.ball_row(c, r)
            if not cov.all() or len(cs) > (1 << self.code_lens[n]):
                bad.append(n)
        return bad


def build_covering_family(S: FiniteMetricSpace, eta: EntropyProfile | None, n_max: int,
                          exact_limit: int = 24) -> FiniteFamily:
    """Greedy covers at radius 2^{-n-1}, codes in discovery order.

    With a profile the code length at level n is its eta(n+1) upper value;
    a cover needing more codes raises CodeLengthOverflow.
    """
    centers, lens = [], []
    for n in range(n_max + 1):
        res = covering_number(S, _pow2(n + 1), exact_limit)
        cs = res.centers if len(S) > exact_limit else sorted(res.centers)
        if eta is not None:
            L = eta.eta(n + 1)[1]
            if len(cs) > (1 << L):
                raise CodeLengthOverflow(f"level {n} needs {len(cs)} balls, eta(n+1) = {L} allows {1 << L}")
        else:
            L = ceil_log2(len(cs))
        centers.append(list(cs))
        lens.append(L)
    return FiniteFamily(S, centers, lens)


class IntervalFamily:
    """Level n: 2^n balls of radius 2^{-n-1} around (2a+1)/2^{n+1}, codes of n bits."""

    n_max = None

    def code_len(self, n: int) -> int:
        return n

    def count(self, n: int) -> int:
        return 1 << n

    def center(self, n: int, a: int) -> Fraction:
        if not 0 <= a < (1 << n):
            raise BlockNotInDomain(f"code {a} outside dom at level {n}")
        return Fraction(2 * a + 1, 1 << (n + 1))

    def dist(self, p, q) -> Fraction:
        return abs(Fraction(p) - Fraction(q))

    def choose(self, n: int, y: Fraction) -> int:
        y = Fraction(y)
        if not 0 <= y <= 1:
            raise NoCoveringBall(f"{y} outside [0;1]")
        return min(max(math.ceil(y * (1 << n)) - 1, 0), (1 << n) - 1)

    def full(self):
        return (Fraction(0), Fraction(1))

    def restrict(self, region, n, a, radius):
        c = self.center(n, a)
        return (max(region[0], c - radius), min(region[1], c + radius))

    def union(self, regions):
        regions = [r for r in regions if r[0] <= r[1]]
        if not regions:
            return (Fraction(1), Fraction(0))
        return (min(r[0] for r in regions), max(r[1] for r in regions))

    def empty(self, region) -> bool:
        return region[0] > region[1]

    def candidates(self, n, lo, hi):
        return range(lo, min(hi, 1 << n))


# Donghyun schedules

@dataclass
class PhiSchedule:
    values: list[int]
    c: Fraction
    probe: int
    verified_conditions: dict[str, bool] = field(default_factory=dict)
    first_failure: dict[str, int | None] = field(default_factory=dict)

    @property
    def phi(self) -> GrowthFn:
        return table(self.values, strict=True)

    @property
    def ok(self) -> bool:
        return all(self.verified_conditions.get(k, False) for k in "abcd")

    def loinv(self, n: int) -> int:
        import bisect
        i = bisect.bisect_left(self.values, n)
        if i >= len(self.values):
            raise LevelOutOfRange(f"schedule ends at {self.values[-1]} < {n}")
        return i

    def to_dict(self) -> dict:
        return {"phi": self.values, "c": str(self.c), "probe": self.probe,
                "conditions": self.verified_conditions, "first_failure": self.first_failure}


def named_eta(name: str) -> GrowthFn:
    """Test entropies: id, n^{3/2}, n^2, 2^{n/4} (ceilings, in exact integers)."""
    def ceil_root(x: int, k: int) -> int:
        # least r with r^k >= x, for k in {2, 4}
        r = math.isqrt(x) if k == 2 else math.isqrt(math.isqrt(x))
        return r if r ** k >= x else r + 1

    if name in ("id", "n"):
        return identity()
    if name in ("n^3/2", "n^(3/2)", "n32"):
        return from_fn(lambda n: ceil_root(n ** 3, 2), "ceil(n^3/2)")
    if name in ("n^2", "n2"):
        return from_fn(lambda n: n * n, "n^2")
    if name in ("2^n/4", "2^(n/4)", "exp4"):
        return from_fn(lambda n: ceil_root(1 << n, 4), "ceil(2^(n/4))")
    raise ValueError(f"unknown entropy name {name!r}")


def _check_schedule(eta: Callable[[int], int], phi: list[int], c: Fraction,
                    n_max: int) -> tuple[dict[str, bool], dict[str, int | None]]:
    ok = {k: True for k in "abcd"}
    first: dict[str, int | None] = {k: None for k in "abcd"}
    for m in range(len(phi) - 1):
        p, q = phi[m], phi[m + 1]
        tests = {"a": eta(q) <= c * c * eta(p + 1),
                 "b": c * eta(p) <= eta(q),
                 "c": c * eta(p + 1) <= eta(q + 1)}
        for k, good in tests.items():
            if not good and ok[k]:
                ok[k], first[k] = False, m
    bound = c ** 3 / (c - 1)
    prefix = np.cumsum([eta(v) for v in phi], dtype=object)
    j = 0
    for n in range(n_max + 1):
        while phi[j] < n:
            j += 1
        if prefix[j] > bound * eta(n):
            ok["d"], first["d"] = False, n
            break
    return ok, first


def donghyun_phi(eta: GrowthFn | Callable[[int], int], c=Fraction(3, 2), n_max: int = 4096) -> PhiSchedule:
    """Greedy run-cutter: from phi(m) = p jump to the largest q with
    eta(q) <= c^2 eta(p+1) that also keeps c eta(p) <= eta(q) and
    c eta(p+1) <= eta(q+1). The schedule runs until it passes n_max so that
    the sum condition can be checked at every n <= n_max; all four
    conditions are then re-verified from scratch.
    """
    c = Fraction(c)
    if c <= 1:
        raise ValueError("c must exceed 1")
    # start at the last zero of eta, if any, within the probe range
    start = 0
    if eta(0) == 0:
        lo, hi = 0, n_max + 1
        if eta(hi) == 0:
            raise ConditionUnsatisfiable(f"eta vanishes on the whole probe range 0..{hi}")
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if eta(mid) == 0:
                lo = mid
            else:
                hi = mid
        start = lo
    phi = [start]
    c2 = c * c
    while phi[-1] < n_max:
        p = phi[-1]
        cap = c2 * eta(p + 1)
        need_b = c * eta(p)
        need_c = c * eta(p + 1)
        q = p + 1
        if not (eta(q) <= cap):
            raise ConditionUnsatisfiable(f"condition (a) fails at phi = {p}: eta({q}) > c^2 eta({p + 1})")
        # galloping search for the last q with eta(q) <= cap
        step = 1
        ceiling = max(n_max, 1) << 20  # a bounded eta would otherwise gallop forever
        while q + step <= ceiling and eta(q + step) <= cap:
            q += step
            step *= 2
        while step > 1:
            step //= 2
            if q + step <= ceiling and eta(q + step) <= cap:
                q += step
        # walk back until (b) and (c) hold
        while q > p and not (need_b <= eta(q) and need_c <= eta(q + 1)):
            q -= 1
        if q == p:
            raise ConditionUnsatisfiable(f"no successor of phi = {p} satisfies (b) and (c) under (a)")
        phi.append(q)
    ok, first = _check_schedule(eta, phi, c, n_max)
    return PhiSchedule(phi, c, n_max, ok, first)


def kappa_phi_bound_check(eta: GrowthFn, sched: PhiSchedule, n_max: int) -> int | None:
    """First n <= n_max with kappa^phi(n) > c^3/(c-1) eta(n+1), or None.

    Here the schedule is one built for eta(n+1) and kappa^phi(n) sums
    eta(phi(m)+1) over m <= loinv(phi)(n).
    """
    bound = sched.c ** 3 / (sched.c - 1)
    total = 0
    j = -1
    for n in range(n_max + 1):
        L = sched.loinv(n)
        while j < L:
            j += 1
            total += eta(sched.values[j] + 1)
        if total > bound * eta(n + 1):
            return n
    return None


# the representation

class StandardRep:
    """Standard representation of a covering family, optionally subsampled.

    Block m holds a code of level phi(m). Domain condition between blocks
    m, m': addressed centres within 2^{-phi(m)} + 2^{-phi(m')}.
    """

    def __init__(self, family, phi: GrowthFn | None = None, name: str | None = None):
        self.family = family
        self.phi = phi or identity()
        self.name = name or ("xi" if phi is None else f"xi^phi[{self.phi.name}]")
        fam = family

        def kappa(n):
            m = self.blocks_for(n)
            return sum(fam.code_len(self.phi(k)) for k in range(m + 1))
        self.modulus = from_fn(kappa, f"kappa[{self.name}]")

    def blocks_for(self, n: int) -> int:
        """loinv(phi)(n): index of the first block whose level reaches n."""
        m = 0
        while self.phi(m) < n:
            m += 1
        return m

    def offsets(self, blocks: int) -> list[int]:
        offs = [0]
        for m in range(blocks):
            offs.append(offs[-1] + self.family.code_len(self.phi(m)))
        return offs

    def parse(self, prefix: Word) -> tuple[list[int], str]:
        """Complete block codes and the trailing partial block."""
        codes = []
        pos = 0
        m = 0
        while True:
            if self.family.n_max is not None and self.phi(m) > self.family.n_max:
                return codes, prefix[pos:]
            L = self.family.code_len(self.phi(m))
            if pos + L > len(prefix):
                return codes, prefix[pos:]
            codes.append(int(prefix[pos:pos + L], 2) if L else 0)
            pos += L
            m += 1
            if L == 0 and pos >= len(prefix) and m > 64:
                return codes, ""

    def _check_domain(self, codes: list[int]) -> None:
        fam = self.family
        cs = []
        for m, a in enumerate(codes):
            lev = self.phi(m)
            if a >= fam.count(lev):
                raise BlockNotInDomain(f"block {m}: code {a} outside dom at level {lev}")
            cs.append((fam.center(lev, a), lev))
        for i in range(len(cs)):
            for j in range(i):
                if fam.dist(cs[i][0], cs[j][0]) > _pow2(cs[i][1]) + _pow2(cs[j][1]):
                    raise DomainViolation(f"blocks {j} and {i} address centres too far apart")

    def decode(self, prefix: Word, n: int):
        """Centre of the first block at level >= n; within 2^{-n} of the value."""
        m = self.blocks_for(n)
        codes, _ = self.parse(prefix)
        if len(codes) <= m:
            raise InsufficientInput(f"need {m + 1} blocks ({self.modulus(n)} bits), have {len(codes)}")
        self._check_domain(codes[:m + 1])
        return self.family.center(self.phi(m), codes[m])

    def image(self, prefix: Word):
        fam = self.family
        try:
            codes, tail = self.parse(prefix)
            self._check_domain(codes)
        except (BlockNotInDomain, DomainViolation):
            return None
        region = fam.full()
        for m, a in enumerate(codes):
            lev = self.phi(m)
            region = fam.restrict(region, lev, a, _pow2(lev))
        if tail:
            m = len(codes)
            lev = self.phi(m)
            L = fam.code_len(lev)
            t = len(tail)
            lo = int(tail, 2) << (L - t)
            hi = (int(tail, 2) + 1) << (L - t)
            parts = []
            for a in fam.candidates(lev, lo, hi):
                try:
                    self._check_domain(codes + [a])
                except (BlockNotInDomain, DomainViolation):
                    continue
                parts.append(fam.restrict(region, lev, a, _pow2(lev)))
            region = fam.union(parts)
        if fam.empty(region):
            return None
        return region

    def encode_word(self, oracle: Callable[[int], object], blocks: int) -> Word:
        """Blocks 0..blocks-1; block m reads oracle(phi(m)+1)."""
        out = []
        for m in range(blocks):
            lev = self.phi(m)
            try:
                y = oracle(lev + 1)
            except InsufficientInput:
                break
            out.append(code_word(self.family.choose(lev, y), self.family.code_len(lev)))
        return "".join(out)

    def encode(self, oracle: Callable[[int], object], horizon: int) -> Stream:
        state = {"m": 0}

        def extend(have):
            m = state["m"]
            lev = self.phi(m)
            if self.family.n_max is not None and lev > self.family.n_max:
                return ""
            try:
                y = oracle(lev + 1)
            except InsufficientInput:
                return ""
            state["m"] = m + 1
            w = code_word(self.family.choose(lev, y), self.family.code_len(lev))
            return w if w else extend(have)

        return Stream(extend, horizon, label=self.name)


class StandardRealRep(StandardRep, RealRep):
    """Standard representation of [0;1] over the interval family."""

    def __init__(self, phi: GrowthFn | None = None):
        StandardRep.__init__(self, IntervalFamily(), phi)


class StandardPointRep(StandardRep, PointRep):
    def __init__(self, family: FiniteFamily, phi: GrowthFn | None = None):
        StandardRep.__init__(self, family, phi)
        self.space = family.space

    def spread(self, prefix):
        mask = self.image(prefix)
        return None if mask is None else mask_diameter(self.space, mask)


def standard_decode(F, prefix: Word, n: int):
    return StandardRep(F).decode(prefix, n)


def standard_encode(F, x: Callable[[int], object], horizon: int) -> Stream:
    return StandardRep(F).encode(x, horizon)


def subsampled_decode(F, phi: PhiSchedule | GrowthFn, prefix: Word, n: int):
    return StandardRep(F, _as_phi(phi)).decode(prefix, n)


def subsampled_encode(F, phi: PhiSchedule | GrowthFn, x: Callable[[int], object], horizon: int) -> Stream:
    return StandardRep(F, _as_phi(phi)).encode(x, horizon)


def _as_phi(phi) -> GrowthFn:
    return phi.phi if isinstance(phi, PhiSchedule) else phi


def kappa_of(F) -> GrowthFn:
    return StandardRep(F).modulus


def kappa_phi_of(F, phi: PhiSchedule | GrowthFn) -> GrowthFn:
    return StandardRep(F, _as_phi(phi)).modulus


def point_oracle(family: FiniteFamily, x: int) -> Callable[[int], int]:
    """Oracle for a point of the space itself (always exact)."""
    return lambda n: x


def mask_oracle(rep: PointRep, prefix: Word) -> Callable[[int], int]:
    """Oracle from a rival representation's prefix: lowest point of the image
    of the shortest initial segment whose image has diameter <= 2^{-n}."""
    def oracle(n):
        target = _pow2(n)
        for L in range(len(prefix) + 1):
            s = rep.spread(prefix[:L])
            if s is not None and s <= target:
                return int(np.argmax(rep.image(prefix[:L])))
        raise InsufficientInput(f"prefix of {len(prefix)} bits too short for 2^-{n}")
    return oracle
