"""Calculus of non-decreasing unbounded integer functions.

A :class:`GrowthFn` wraps a map ``N -> N`` with a memo table, checks
monotonicity on every evaluation and exposes composition, semi-inverses,
growth-class witnesses and the continuity gauge.
"""
from __future__ import annotations

import bisect
import json
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

DEFAULT_CEILING = 1 << 20


class SearchCeilingExceeded(RuntimeError):
    pass


class MonotonicityViolation(ValueError):
    pass


class UnboundedDemandFailed(ValueError):
    pass


class DepthTooSmall(ValueError):
    pass


class BracketTooLoose(ValueError):
    pass


class GrowthFn:
    """Non-decreasing map N -> N with a thread-safe memo table.

    ``strict`` additionally claims strict monotonicity. Both claims are
    checked against the neighbouring probed arguments whenever a new
    argument is evaluated.
    """

    __slots__ = ("_fn", "_memo", "_keys", "_lock", "strict", "name", "ceiling")

    def __init__(self, fn: Callable[[int], int], *, strict: bool = False,
                 name: str | None = None, ceiling: int = DEFAULT_CEILING):
        self._fn = fn
        self._memo: dict[int, int] = {}
        self._keys: list[int] = []
        self._lock = threading.RLock()
        self.strict = strict
        self.name = name or getattr(fn, "__name__", "fn")
        self.ceiling = ceiling

    def __repr__(self):
        return f"GrowthFn({self.name})"

    def __call__(self, n: int) -> int:
        if n < 0:
            raise ValueError(f"{self.name}: negative argument {n}")
        memo = self._memo
        v = memo.get(n)
        if v is not None:
            return v
        v = int(self._fn(n))
        if v < 0:
            raise MonotonicityViolation(f"{self.name}({n}) = {v} is negative")
        with self._lock:
            if n in memo:
                return memo[n]
            keys = self._keys
            i = bisect.bisect_left(keys, n)
            if i > 0:
                self._check(keys[i - 1], memo[keys[i - 1]], n, v)
            if i < len(keys):
                self._check(n, v, keys[i], memo[keys[i]])
            keys.insert(i, n)
            memo[n] = v
        return v

    def _check(self, a, va, b, vb):
        if va > vb or (self.strict and va >= vb):
            rel = "strictly increasing" if self.strict else "non-decreasing"
            raise MonotonicityViolation(
                f"{self.name} not {rel}: f({a})={va}, f({b})={vb}")

    @property
    def probe_limit(self) -> int:
        with self._lock:
            return self._keys[-1] if self._keys else -1

    def demand_growth(self, floor: int, at: int | None = None) -> None:
        """Assert the declared unboundedness at a point: f(at) >= floor."""
        at = self.ceiling if at is None else at
        if self(at) < floor:
            raise UnboundedDemandFailed(
                f"{self.name}({at}) = {self(at)} < demanded {floor}")

    def values(self, n: int) -> list[int]:
        return [self(i) for i in range(n)]

    # small combinators, all returning new GrowthFn values

    def then(self, outer: "GrowthFn") -> "GrowthFn":
        return compose(outer, self)

    def shift(self, c: int) -> "GrowthFn":
        """n -> f(n + c)."""
        return GrowthFn(lambda n: self(n + c), strict=self.strict,
                        name=f"{self.name}(n+{c})", ceiling=self.ceiling)

    def plus(self, c: int) -> "GrowthFn":
        """n -> f(n) + c."""
        return GrowthFn(lambda n: self(n) + c, strict=self.strict,
                        name=f"{self.name}+{c}", ceiling=self.ceiling)

    def scale(self, c: int) -> "GrowthFn":
        return GrowthFn(lambda n: c * self(n), strict=self.strict and c > 0,
                        name=f"{c}*{self.name}", ceiling=self.ceiling)


# constructors

def identity() -> GrowthFn:
    return GrowthFn(lambda n: n, strict=True, name="id")


def linear(a: int, b: int = 0) -> GrowthFn:
    """n -> a*n + b."""
    return GrowthFn(lambda n: a * n + b, strict=a > 0, name=f"{a}n+{b}")


def poly(a: int, b: int, c: int = 0) -> GrowthFn:
    """n -> a*n^b + c."""
    return GrowthFn(lambda n: a * n ** b + c, strict=a > 0 and b > 0,
                    name=f"{a}n^{b}+{c}")


def exp(base: int) -> GrowthFn:
    return GrowthFn(lambda n: base ** n, strict=base > 1, name=f"{base}^n")


def table(values: Sequence[int], *, strict: bool = False) -> GrowthFn:
    """Finite table, continued past its end with slope 1."""
    vals = [int(v) for v in values]
    if not vals:
        raise ValueError("empty table")
    for i in range(len(vals) - 1):
        if vals[i] > vals[i + 1] or (strict and vals[i] == vals[i + 1]):
            raise MonotonicityViolation(f"table not monotone at {i}: {vals[i]}, {vals[i + 1]}")
    last = len(vals) - 1

    def f(n):
        return vals[n] if n <= last else vals[last] + (n - last)

    return GrowthFn(f, strict=strict, name=f"table[{len(vals)}]")


def from_fn(fn: Callable[[int], int], name: str, strict: bool = False) -> GrowthFn:
    return GrowthFn(fn, strict=strict, name=name)


def parse_growth(spec) -> GrowthFn:
    """Parse a config literal: "id", "linear a b", "poly a b c", "exp base",
    "table [v0, v1, ...]". Dicts of the form {"table": [...]} are accepted too."""
    if isinstance(spec, dict) and "table" in spec:
        return table(spec["table"])
    if not isinstance(spec, str):
        raise ValueError(f"cannot parse growth literal {spec!r}")
    s = spec.strip()
    head, _, rest = s.partition(" ")
    if head == "id":
        return identity()
    if head == "table":
        return table(json.loads(rest))
    args = [int(x) for x in rest.split()]
    if head == "linear" and len(args) in (1, 2):
        return linear(*args)
    if head == "poly" and len(args) in (2, 3):
        return poly(*args)
    if head == "exp" and len(args) == 1:
        return exp(args[0])
    raise ValueError(f"cannot parse growth literal {spec!r}")


# algebra

def compose(outer: GrowthFn, inner: GrowthFn) -> GrowthFn:
    return GrowthFn(lambda n: outer(inner(n)), strict=outer.strict and inner.strict,
                    name=f"{outer.name}∘{inner.name}",
                    ceiling=max(outer.ceiling, inner.ceiling))


def pointwise_max(*fs: GrowthFn) -> GrowthFn:
    return GrowthFn(lambda n: max(f(n) for f in fs), strict=all(f.strict for f in fs),
                    name="max{" + ",".join(f.name for f in fs) + "}")


def pointwise_min(*fs: GrowthFn) -> GrowthFn:
    return GrowthFn(lambda n: min(f(n) for f in fs), strict=all(f.strict for f in fs),
                    name="min{" + ",".join(f.name for f in fs) + "}")


def pointwise_sum(*fs: GrowthFn) -> GrowthFn:
    return GrowthFn(lambda n: sum(f(n) for f in fs), strict=any(f.strict for f in fs),
                    name="+".join(f.name for f in fs))


def _first_true(pred: Callable[[int], bool], ceiling: int, what: str) -> int:
    """Least m in [0, ceiling] with pred(m), pred monotone in m."""
    if pred(0):
        return 0
    lo, hi = 0, 1  # pred(lo) is false throughout
    while not pred(hi):
        if hi >= ceiling:
            raise SearchCeilingExceeded(f"{what}: no witness up to {ceiling}")
        lo, hi = hi, min(2 * hi, ceiling)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def lower_semi_inverse(nu: GrowthFn, ceiling: int | None = None) -> GrowthFn:
    """n -> min{m : nu(m) >= n}."""
    ceil = nu.ceiling if ceiling is None else ceiling
    return GrowthFn(lambda n: _first_true(lambda m: nu(m) >= n, ceil, f"loinv {nu.name}({n})"),
                    name=f"loinv({nu.name})", ceiling=ceil)


def upper_semi_inverse(nu: GrowthFn, ceiling: int | None = None) -> GrowthFn:
    """n -> min{m : nu(m+1) > n}."""
    ceil = nu.ceiling if ceiling is None else ceiling
    return GrowthFn(lambda n: _first_true(lambda m: nu(m + 1) > n, ceil, f"upinv {nu.name}({n})"),
                    name=f"upinv({nu.name})", ceiling=ceil)


def table_lower_semi_inverse(values: np.ndarray, ns: np.ndarray) -> np.ndarray:
    """Vectorised loinv over a non-decreasing table; callers keep ns within range."""
    return np.searchsorted(values, ns, side="left")


def table_upper_semi_inverse(values: np.ndarray, ns: np.ndarray) -> np.ndarray:
    return np.maximum(np.searchsorted(values, ns, side="right") - 1, 0)


# growth classes

CLASS_TAGS = ("O", "P", "S", "arg-O", "arg-P", "arg-S", "lin", "poly", "O-S", "P-O")


def class_bound(tag: str, mu: GrowthFn, C: int, n: int) -> int:
    """Right-hand side of the defining inequality nu(n) <= bound."""
    if tag == "O":
        return C * mu(n) + C
    if tag == "P":
        return (C + C * mu(n)) ** C
    if tag == "S":
        return mu(n) + C
    if tag == "arg-O":
        return mu(C * n + C)
    if tag == "arg-P":
        return mu(C * n ** C + C)
    if tag == "arg-S":
        return mu(n + C)
    if tag == "lin":
        return C + C * mu(C + C * n)
    if tag == "poly":
        return (n + C + C * mu(C * n ** C + C)) ** C
    # composite forms used by the admissibility conditions:
    # value scaled linearly after shifting the argument, and
    # polynomial in value after a linear change of argument
    if tag == "O-S":
        return C * mu(n + C) + C
    if tag == "P-O":
        return (C + C * mu(C * n + C)) ** C
    raise ValueError(f"unknown class tag {tag!r}")


@dataclass(frozen=True)
class ClassWitness:
    class_tag: str
    constant: int
    checked_up_to: int
    holds: bool
    counterexample: int | None = None

    def __bool__(self):
        return self.holds


def check_class(nu: GrowthFn, mu: GrowthFn, tag: str, C: int, N: int) -> ClassWitness:
    if C < 0:
        raise ValueError("constant must be non-negative")
    for n in range(N + 1):
        if nu(n) > class_bound(tag, mu, C, n):
            return ClassWitness(tag, C, N, False, n)
    return ClassWitness(tag, C, N, True)


def find_class_constant(nu: GrowthFn, mu: GrowthFn, tag: str, N: int,
                        C_max: int = 1 << 10) -> ClassWitness:
    """Least C <= C_max whose check holds up to N; otherwise the failing witness at C_max."""
    lo, hi = 0, C_max
    if not check_class(nu, mu, tag, hi, N):
        return check_class(nu, mu, tag, hi, N)
    # every tag's bound is monotone in C, so bisect
    while lo < hi:
        mid = (lo + hi) // 2
        if check_class(nu, mu, tag, mid, N):
            hi = mid
        else:
            lo = mid + 1
    return check_class(nu, mu, tag, lo, N)


def composed_constant(tag: str, C1: int, C2: int) -> int:
    """Constant for the transitive composite of two witnesses of the same tag.

    nu <= T_C1(mu) and mu <= T_C2(kappa) imply nu <= T_C3(kappa) for the C3
    returned here (a valid, not necessarily least, constant).
    """
    if tag == "O":
        return C1 * C2 + C1
    if tag in ("S", "arg-S"):
        return C1 + C2
    if tag == "arg-O":
        return C1 * C2 + C2
    if tag == "lin":
        # C1 + C1*(C2 + C2*kappa(C2 + C2*(C1 + C1 n)))
        # <= C3 + C3*kappa(C3 + C3 n) with C3 = max(C1 + C1*C2, C1*C2, C2 + C2*C1)
        return C1 + C1 * C2 + C2
    raise ValueError(f"no composition rule recorded for {tag!r}")


# gauge

@dataclass(frozen=True)
class GaugeBracket:
    lo: Fraction
    hi: Fraction

    def __iter__(self):
        return iter((self.lo, self.hi))


def _gauge_items(mu: GrowthFn, depth: int) -> list[tuple[int, int]]:
    """Undominated terms (mu(n), n) with mu(n) <= depth, largest weight first.

    A term is dominated when another of equal weight is cheaper, or when a
    smaller term is cheaper per unit of weight (copies of it then replace
    the larger one at lower cost).
    """
    by_weight: dict[int, int] = {}
    n = 0
    while True:
        v = mu(n)
        if v > depth:
            break
        by_weight[v] = n  # later n is cheaper for the same weight
        n += 1
        if n > (1 << 16):
            raise SearchCeilingExceeded(f"{mu.name} stays below {depth}")
    items = sorted(by_weight.items())  # (v, n), v ascending = weight descending
    kept: list[tuple[int, int]] = []
    best_rate = None  # min over smaller terms of v - n (log2 of cost per unit)
    for v, n in reversed(items):
        rate = v - n
        if best_rate is None or rate <= best_rate:
            kept.append((v, n))
            best_rate = rate
    kept.reverse()
    return kept


def gauge_omega(mu: GrowthFn, t: Fraction, depth: int) -> GaugeBracket:
    """Bracket omega_mu(t) = inf{sum 2^{-n_j} : t <= sum 2^{-mu(n_j)}}.

    ``hi`` is the exact optimum over terms with mu(n) <= depth. With power
    of two weights and per-unit cost ordered by size, an optimal cover takes
    floor(t/w) copies of the largest useful term and either rounds up with
    one more copy or recurses on the remainder. ``lo`` is the dual bound
    omega(t) >= 2^{-m} for the least m with 2^{-mu(m)} <= t (strict mu),
    raised to ``hi`` when the optimum is provably exact: strict mu and t a
    multiple of 2^{-depth}, so finer terms cannot help.
    """
    t = Fraction(t)
    if t < 0:
        raise ValueError("negative argument")
    if t == 0:
        return GaugeBracket(Fraction(0), Fraction(0))
    items = _gauge_items(mu, depth)
    if not items:
        raise DepthTooSmall(f"mu(0) = {mu(0)} exceeds depth {depth}")

    def solve(rem: Fraction, i: int) -> Fraction:
        v, n = items[i]
        w = Fraction(1, 1 << v)
        c = Fraction(1, 1 << n)
        q, r = divmod(rem, w)
        q = int(q)
        if r == 0:
            return q * c
        up = (q + 1) * c
        if i + 1 == len(items):
            return up
        return min(up, q * c + solve(r, i + 1))

    hi = solve(t, 0)
    lo = Fraction(0)
    if mu.strict:
        m = 0
        while Fraction(1, 1 << mu(m)) > t:
            m += 1
        lo = Fraction(1, 1 << m)
        if lo > hi:
            raise BracketTooLoose(f"dual bound {lo} above cover {hi}")
        if (t * (1 << depth)).denominator == 1:
            lo = hi
    return GaugeBracket(lo, hi)


def modulus_from_gauge(mu: GrowthFn, n: int, depth: int) -> int:
    """min{m : omega_mu(2^{-m}) <= 2^{-n}}, recovered from the gauge brackets."""
    if not mu.strict:
        raise ValueError("modulus recovery needs a strictly increasing mu")
    target = Fraction(1, 1 << n)
    for m in range(depth + 1):
        br = gauge_omega(mu, Fraction(1, 1 << m), depth)
        by_hi = br.hi <= target
        by_lo = br.lo <= target
        if by_hi:
            return m
        if by_lo and not by_hi:
            raise BracketTooLoose(f"omega(2^-{m}) in [{br.lo}, {br.hi}] straddles 2^-{n}")
    raise DepthTooSmall(f"no threshold up to depth {depth}")
