"""Brute-force reference computations used to freeze expected values.

Each oracle is deliberately naive and shares no code with the package.
"""
from fractions import Fraction
from itertools import combinations, product


def loinv_scan(f, n, upto=10_000):
    for m in range(upto):
        if f(m) >= n:
            return m
    raise ValueError("no witness")


def upinv_scan(f, n, upto=10_000):
    """Least m with f(m+1) > n."""
    for m in range(upto):
        if f(m + 1) > n:
            return m
    raise ValueError("no witness")


def gauge_brute(mu, t, depth=8, terms=4):
    """inf sum 2^-n_j over at most ``terms`` indices with t <= sum 2^-mu(n_j)."""
    idx = [n for n in range(depth + 1) if mu(n) <= depth]
    best = None
    for k in range(1, terms + 1):
        for combo in product(idx, repeat=k):
            if sum(Fraction(1, 2 ** mu(n)) for n in combo) >= t:
                c = sum(Fraction(1, 2 ** n) for n in combo)
                best = c if best is None else min(best, c)
    return best


def modulus_dp(mu, n, depth=12):
    """min{m : omega_mu(2^-m) <= 2^-n} via an unbounded covering knapsack."""
    terms = [(1 << (depth - mu(k)), Fraction(1, 2 ** k)) for k in range(depth + 1) if mu(k) <= depth]
    size = 1 << depth
    dp = [Fraction(0)] + [None] * size
    for u in range(1, size + 1):
        dp[u] = min(c + dp[max(0, u - w)] for w, c in terms)
    for m in range(depth + 1):
        if dp[1 << (depth - m)] <= Fraction(1, 2 ** n):
            return m
    raise ValueError("depth too small")


def pair_closed(n, m):
    return (n + m) * (n + m + 1) // 2 + n


def binary_series(bits):
    return sum(Fraction(int(b), 2 ** (i + 1)) for i, b in enumerate(bits))


def signed_series(digits):
    """Value of a signed-digit sequence under the [0;1] convention (1 + sum d_i 2^-i-1)/2."""
    return (1 + sum(Fraction(d, 2 ** (i + 1)) for i, d in enumerate(digits))) / 2


def covering_brute(points, dist, r):
    """Least number of closed r-balls centred in the set covering it."""
    n = len(points)
    balls = [frozenset(j for j in range(n) if dist(points[i], points[j]) <= r) for i in range(n)]
    for k in range(1, n + 1):
        for cs in combinations(range(n), k):
            if len(frozenset().union(*(balls[c] for c in cs))) == n:
                return k
    return n


def packing_brute(points, dist, r):
    """Largest subset with pairwise distances > r."""
    n = len(points)
    best = 1
    for k in range(2, n + 1):
        found = False
        for cs in combinations(range(n), k):
            if all(dist(points[a], points[b]) > r for a, b in combinations(cs, 2)):
                found = True
                break
        if not found:
            break
        best = k
    return best


def hausdorff_brute(A, B, d):
    return max(max(min(d(a, b) for b in B) for a in A), max(min(d(a, b) for a in A) for b in B))
