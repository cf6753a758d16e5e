"""Vectorised semi-inverse law checks over batches of random monotone tables.

Each row of a batch is a non-decreasing table nu[0..L-1]. A law is only
evaluated where every value it touches is defined by the table.
"""
import numpy as np


def monotone_batch(rng, B, L, start=4, step=4):
    first = rng.integers(0, start, size=(B, 1))
    steps = rng.integers(0, step, size=(B, L - 1))
    return np.concatenate([first, first + np.cumsum(steps, axis=1)], axis=1)


def strict_batch(rng, B, L):
    steps = rng.integers(1, 4, size=(B, L - 1))
    return np.concatenate([np.zeros((B, 1), dtype=np.int64), np.cumsum(steps, axis=1)], axis=1)


def loinv(nu, N):
    """min{m : nu(m) >= n} for n < N, with a validity mask."""
    n = np.arange(N)
    lo = (nu[:, :, None] < n[None, None, :]).sum(axis=1)
    return lo, n[None, :] <= nu[:, -1:]


def upinv(nu, N):
    """min{m : nu(m+1) > n} for n < N, with a validity mask."""
    n = np.arange(N)
    r = (nu[:, :, None] <= n[None, None, :]).sum(axis=1)
    return np.maximum(r - 1, 0), n[None, :] < nu[:, -1:]


def take(f, idx, ok):
    """f(idx) row-wise, masked where idx leaves the table."""
    L = f.shape[1]
    good = ok & (idx < L) & (idx >= 0)
    return np.take_along_axis(f, np.clip(idx, 0, L - 1), axis=1), good


def law_violations(rng, B, L=24, N=40):
    """Counts of violated instances per law over B random tables (and triples)."""
    out = {}
    mu = monotone_batch(rng, B, L)
    nu = monotone_batch(rng, B, L)
    ka = monotone_batch(rng, B, L)
    lo, lo_ok = loinv(mu, N)
    up, up_ok = upinv(mu, N)

    both = lo_ok & up_ok
    out["a: loinv <= upinv"] = int((both & (lo > up)).sum())
    out["a': loinv <= upinv + 1"] = int((both & (lo > up + 1)).sum())

    # b: loinv(mu)(mu(n)) <= n <= upinv(mu)(mu(n)) and mu(upinv(n)) <= n <= mu(loinv(n))
    n = np.broadcast_to(np.arange(L), mu.shape)
    lo_full, lo_okf = loinv(mu, int(mu.max()) + 2)
    up_full, up_okf = upinv(mu, int(mu.max()) + 2)
    a, ga = take(lo_full, mu, np.ones_like(mu, dtype=bool))
    ga &= np.take_along_axis(lo_okf, np.clip(mu, 0, lo_okf.shape[1] - 1), axis=1)
    b, gb = take(up_full, mu, np.ones_like(mu, dtype=bool))
    gb &= np.take_along_axis(up_okf, np.clip(mu, 0, up_okf.shape[1] - 1), axis=1)
    out["b: loinv(mu(n)) <= n"] = int((ga & (a > n)).sum())
    out["b: n <= upinv(mu(n))"] = int((gb & (b < n)).sum())
    m_up, g_up = take(mu, up, up_ok)
    m_lo, g_lo = take(mu, lo, lo_ok)
    nn = np.broadcast_to(np.arange(N), up.shape)
    out["b: mu(upinv(n)) <= n"] = int((g_up & (m_up > nn)).sum())
    out["b: mu(upinv(n)) <= n for n >= mu(0)"] = int((g_up & (m_up > nn) & (nn >= mu[:, :1])).sum())
    out["b: n <= mu(loinv(n))"] = int((g_lo & (m_lo < nn)).sum())

    # c, pointwise: mu(nu(x)) <= ka(x)  <=>  nu(x) <= upinv(mu)(ka(x))
    mn, g1 = take(mu, nu, np.ones_like(nu, dtype=bool))
    ukx, g2 = take(up, ka, np.ones_like(ka, dtype=bool))
    g2 &= np.take_along_axis(up_ok, np.clip(ka, 0, N - 1), axis=1) & (ka < N)
    g = g1 & g2
    left, right = mn <= ka, nu <= ukx
    out["c: first equivalence"] = int((g & (left != right)).sum())
    out["c: first equivalence where mu(0) <= ka(x)"] = int((g & (left != right) & (mu[:, :1] <= ka)).sum())

    # c, second equivalence on the finite range: mu o nu <= ka everywhere => mu <= ka o loinv(nu)
    # nu is clipped into the table and ka raised to max(ka, mu o nu), so the
    # premise holds on every row
    nuc = np.minimum(nu, L - 1)
    mnc = np.take_along_axis(mu, nuc, axis=1)
    ka2 = np.maximum(ka, mnc)
    lnu, lnu_ok = loinv(nuc, N)
    kl, gk = take(ka2, lnu, lnu_ok)
    mu_y = mu[:, :N] if N <= L else np.pad(mu, ((0, 0), (0, N - L)), mode="edge")
    yok = np.broadcast_to(np.arange(N) < L, kl.shape)
    glob = np.all(mnc <= ka2, axis=1)
    out["c: rows meeting the premise"] = int(glob.sum())
    out["c: second equivalence"] = int((glob[:, None] & gk & yok & (mu_y > kl)).sum())

    # d: nu2(n) <= A + B mu(C + D n)  =>  transported bounds
    A, Bc, C, D = 2, 2, 1, 2
    idx = C + D * np.arange(L)
    cap = A + Bc * np.take(np.pad(mu, ((0, 0), (0, C + D * L)), mode="edge"), idx, axis=1)
    nu2 = np.minimum(nu * 3, cap)
    nu2 = np.maximum.accumulate(nu2, axis=1)
    lmu, lmu_ok = loinv(mu, N)
    umu, umu_ok = upinv(mu, N)
    M = 12
    arg = A + Bc * np.arange(M)
    l2, l2_ok = loinv(nu2, int(arg.max()) + 1)
    u2, u2_ok = upinv(nu2, int(arg.max()) + 1)
    l2a, l2o = l2[:, arg], l2_ok[:, arg]
    u2a, u2o = u2[:, arg], u2_ok[:, arg]
    m_ok_lo = lmu_ok[:, :M] & l2o & (C + D * l2a < L)
    m_ok_up = umu_ok[:, :M] & u2o & (D * u2a + C + D < L)
    out["d: loinv transport"] = int((m_ok_lo & (lmu[:, :M] > C + D * l2a)).sum())
    out["d: upinv transport"] = int((m_ok_up & (umu[:, :M] > D * u2a + C + D - 1)).sum())

    # f: min/max duality
    mn_, mx_ = np.minimum(mu, nu), np.maximum(mu, nu)
    U = lambda f: upinv(f, N)
    Lo = lambda f: loinv(f, N)
    (umu_, o1), (unu_, o2), (umn, o3), (umx, o4) = U(mu), U(nu), U(mn_), U(mx_)
    ok = o1 & o2 & o3 & o4
    out["f: max upinv = upinv min"] = int((ok & (np.maximum(umu_, unu_) != umn)).sum())
    out["f: min upinv = upinv max"] = int((ok & (np.minimum(umu_, unu_) != umx)).sum())
    (lmu_, p1), (lnu_, p2), (lmn, p3), (lmx, p4) = Lo(mu), Lo(nu), Lo(mn_), Lo(mx_)
    ok = p1 & p2 & p3 & p4
    out["f: max loinv = loinv min"] = int((ok & (np.maximum(lmu_, lnu_) != lmn)).sum())
    out["f: min loinv = loinv max"] = int((ok & (np.minimum(lmu_, lnu_) != lmx)).sum())
    return out


def injective_equality_violations(rng, B, L=24):
    nu = strict_batch(rng, B, L)
    N = int(nu[:, -1].min())
    lo, lo_ok = loinv(nu, int(nu.max()) + 2)
    up, up_ok = upinv(nu, int(nu.max()) + 2)
    n = np.broadcast_to(np.arange(L), nu.shape)
    a = np.take_along_axis(lo, nu, axis=1)
    b = np.take_along_axis(up, nu, axis=1)
    ok = np.take_along_axis(up_ok, nu, axis=1)
    return int(((a != n) | (ok & (b != n))).sum())
