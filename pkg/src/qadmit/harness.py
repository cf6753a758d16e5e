"""Empirical certification of moduli, reductions and admissibility, plus
calculators for the realizer/modulus bounds of continuous functions.

A certificate tests a claimed modulus on finitely many inputs: exhaustively
while the input depth is at most 14 bits, by seeded sampling beyond. A
passing certificate is corroboration, not proof.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .cantor import Word, common_prefix_length, iter_words
from .constructions import Realizer, min_input_length
from .entropy import EntropyProfile
from .moduli import (ClassWitness, GrowthFn, find_class_constant, from_fn,
                     lower_semi_inverse, table)
from .reps import InsufficientInput, RealRep, Rep
from .standard_rep import StandardRep
from .unit_interval import (BinaryRep, DyadicRep, PointApprox, SignedRep, SigmaPhiRep,
                            binary_encode_exact, dyadic_decode, dyadic_encode_word,
                            quarter_witness, sigma_to_sigma_phi_word, signed_encode_exact,
                            signed_encode_word)

EXHAUSTIVE_DEPTH = 14
DEFAULT_TRIALS = 10_000


def _pow2(k: int) -> Fraction:
    return Fraction(1, 1 << k)


@dataclass
class Witness:
    n: int
    input_a: Word
    input_b: Word = ""
    detail: str = ""


@dataclass
class ModulusCertificate:
    subject: str
    claimed: str
    claimed_values: list[int]
    n_range: tuple[int, int]
    trials: int
    exhaustive_upto: int | None
    violations: list[Witness] = field(default_factory=list)

    @property
    def passes(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.passes

    def to_json(self) -> str:
        return json.dumps(asdict(self) | {"passes": self.passes}, sort_keys=True)

    def to_text(self) -> str:
        head = (f"{self.subject}: modulus {self.claimed} on n in {self.n_range[0]}..{self.n_range[1]}"
                f" ({self.trials} inputs) -> {'PASS' if self.passes else 'FAIL'}")
        if self.violations:
            w = self.violations[0]
            head += f"\n  first witness n={w.n} a={w.input_a!r} b={w.input_b!r} {w.detail}"
        return head


def _prefixes(rep: Rep | None, length: int, trials: int, rng: random.Random) -> tuple[list[Word], bool]:
    """Inputs of one length: all of them when short, else sorted samples."""
    if length <= EXHAUSTIVE_DEPTH:
        if rep is None:
            return list(iter_words(length)), True
        return list(rep.iter_prefixes(length)), True
    if rep is None:
        got = {"".join(rng.choice("01") for _ in range(length)) for _ in range(trials)}
    else:
        got = {rep.random_prefix(rng, length) for _ in range(trials)}
    return sorted(got), False


def _extension(rep: Rep | None, q: Word, extra: int, rng: random.Random) -> Word:
    if rep is None:
        return q + "".join(rng.choice("01") for _ in range(extra))
    p = q
    for _ in range(extra):
        kids = rep.children(p)
        if not kids:
            break
        p += rng.choice(kids)
    return p


def certify_modulus(T: Callable[[Word], Word], mu: GrowthFn, n_max: int,
                    trials: int = DEFAULT_TRIALS, rng_seed: int = 0, rep: Rep | None = None,
                    subject: str = "transformer", n_min: int = 0, extra: int = 8,
                    max_witnesses: int = 10) -> ModulusCertificate:
    """Every input of length mu(n) yields >= n output bits, and outputs of
    extensions extend the output of the input (prefix monotonicity)."""
    rng = random.Random(rng_seed)
    cert = ModulusCertificate(subject, mu.name, [mu(n) for n in range(n_min, n_max + 1)],
                              (n_min, n_max), 0, None)
    exhaustive_upto = None
    for n in range(n_min, n_max + 1):
        L = mu(n)
        qs, full = _prefixes(rep, L, trials, rng)
        if full:
            exhaustive_upto = n
        cert.trials += len(qs)
        for q in qs:
            out = T(q)
            if len(out) < n:
                cert.violations.append(Witness(n, q, "", f"output has {len(out)} < {n} bits"))
            else:
                q2 = _extension(rep, q, extra, rng)
                out2 = T(q2)
                if out2[:len(out)] != out:
                    cert.violations.append(Witness(n, q, q2, "output of the extension does not extend"))
            if len(cert.violations) >= max_witnesses:
                cert.exhaustive_upto = exhaustive_upto
                return cert
    cert.exhaustive_upto = exhaustive_upto
    return cert


def _descend(rep: RealRep, q: Word, extra: int, low: bool) -> Word:
    """Greedy walk towards the least (or greatest) value below q."""
    p = q
    for _ in range(extra):
        best = None
        for b in rep.children(p):
            lo, hi = rep.image(p + b)
            key = lo if low else -hi
            if best is None or key < best[0]:
                best = (key, b)
        if best is None:
            break
        p += best[1]
    return p


def certify_rep_modulus(rep: Rep, mu: GrowthFn, n_max: int, trials: int = DEFAULT_TRIALS,
                        rng_seed: int = 0, n_min: int = 0, extra: int = 24,
                        max_witnesses: int = 10) -> ModulusCertificate:
    """Names sharing mu(n) bits denote points within 2^{-n}: every domain
    prefix of that length has an image of diameter <= 2^{-n}. Witnesses
    carry two extensions whose images are far apart."""
    rng = random.Random(rng_seed)
    cert = ModulusCertificate(rep.name, mu.name, [mu(n) for n in range(n_min, n_max + 1)],
                              (n_min, n_max), 0, None)
    for n in range(n_min, n_max + 1):
        L = mu(n)
        qs, full = _prefixes(rep, L, trials, rng)
        if full:
            cert.exhaustive_upto = n
        cert.trials += len(qs)
        for q in qs:
            s = rep.spread(q)
            if s is None or s <= _pow2(n):
                continue
            if isinstance(rep, RealRep):
                a, b = _descend(rep, q, extra, True), _descend(rep, q, extra, False)
                detail = f"values near {rep.image(a)[0]} and {rep.image(b)[1]}, spread {s} > 2^-{n}"
            else:
                a, b, detail = q, q, f"image diameter {s} > 2^-{n}"
            cert.violations.append(Witness(n, a, b, detail))
            if len(cert.violations) >= max_witnesses:
                return cert
    return cert


# a function with exponential but no polynomial modulus

LN2_LOWER = Fraction(6931, 10000)
LN2_UPPER = Fraction(6932, 10000)


def log_sampler(t: float) -> float:
    """t -> 1/ln(e/t), continuously extended by 0 at t = 0."""
    return 0.0 if t == 0 else 1.0 / math.log(math.e / t)


def log_sampler_refutation(mu: GrowthFn, n_max: int) -> tuple[int, int] | None:
    """Least n <= n_max at which t = 2^{-mu(n)} and t' = 0 break the claimed
    modulus, as (n, mu(n)); None when no such n exists up to n_max.

    f(2^{-m}) = 1/(1 + m ln 2) exceeds 2^{-n} iff 1 + m ln 2 < 2^n; the
    check uses rational bounds on ln 2, so a reported witness is sound.
    """
    for n in range(n_max + 1):
        m = mu(n)
        if 1 + m * LN2_UPPER < (1 << n):
            return n, m
    return None


def log_sampler_modulus(n: int) -> int:
    """Least m with 1/(1 + m ln 2) <= 2^{-n} at t = 2^{-m} (an exponential law)."""
    return math.ceil(((1 << n) - 1) / LN2_LOWER)


# the dyadic representation's quadratic lower bound

@dataclass(frozen=True)
class QuadraticWitness:
    n: int
    common_prefix: int
    values: tuple[Fraction, Fraction]

    @property
    def ratio(self) -> float:
        return self.common_prefix / self.n ** 2


def dyadic_lower_bound_witnesses(n_max: int) -> list[QuadraticWitness]:
    """Names of 3/4 and 3/4 + 2^{-n} sharing a prefix of about n^2 bits,
    so any modulus of the dyadic representation has mu(n+1) > that length."""
    out = []
    for n in range(2, n_max + 1):
        a, b, x, y = quarter_witness(n, n + 4)
        L = common_prefix_length(a, b)
        xa, xb = dyadic_decode(a, n + 2), dyadic_decode(b, n + 2)
        if abs(xa - x) > _pow2(n + 2) or abs(xb - y) > _pow2(n + 2):
            raise AssertionError(f"witness names at n={n} decode to {xa}, {xb}")
        out.append(QuadraticWitness(n, L, (x, y)))
    return out


# names of known reals and reductions between real representations

def real_name(rep: RealRep, x, n: int) -> Word:
    """A name of the rational x with at least modulus(n) bits."""
    x = Fraction(x)
    need = rep.modulus(n)
    k = n + 2
    while True:
        w = _real_name(rep, x, k)
        if len(w) >= need:
            return w
        k = 2 * k + 1


def _real_name(rep, x, k):
    if isinstance(rep, SignedRep):
        return signed_encode_exact(x, k)
    if isinstance(rep, BinaryRep):
        return binary_encode_exact(x, k)
    if isinstance(rep, DyadicRep):
        return dyadic_encode_word(PointApprox.exact(x), k)
    if isinstance(rep, SigmaPhiRep):
        return sigma_to_sigma_phi_word(signed_encode_exact(x, k), rep.phi)
    if isinstance(rep, StandardRep):
        return rep.encode_word(PointApprox.exact(x).at, k)
    raise TypeError(f"no encoder for {rep.name}")


def encode_into(target: RealRep, x: PointApprox) -> Word:
    """As much of a target name as the approximation supports."""
    if isinstance(target, SignedRep):
        return signed_encode_word(x)
    if isinstance(target, DyadicRep):
        return dyadic_encode_word(x)
    if isinstance(target, SigmaPhiRep):
        return sigma_to_sigma_phi_word(signed_encode_word(x), target.phi)
    if isinstance(target, StandardRep):
        return target.encode_word(x.at, 1 << 16)
    raise TypeError(f"no continuous encoder into {target.name}")


def make_reduction(source: RealRep, target: RealRep) -> Realizer:
    """Read approximations off a source prefix and encode them into the target."""
    return Realizer(lambda q: encode_into(target, PointApprox.from_prefix(source, q)),
                    None, source.name, target.name, f"{source.name}->{target.name}")


@dataclass
class ReductionReport:
    source: str
    target: str
    samples: int
    n_max: int
    failures: list[tuple[str, int, str]]
    certificate: ModulusCertificate | None = None

    @property
    def passes(self) -> bool:
        return not self.failures and (self.certificate is None or self.certificate.passes)


def verify_reduction(zeta: RealRep, xi: RealRep, F: Realizer | Callable[[Word], Word],
                     samples: int = 50, n_max: int = 10, rng_seed: int = 0,
                     cert_n_max: int | None = None, trials: int = 2000) -> ReductionReport:
    """zeta(q) = xi(F(q)) within 2^{-n} for sampled dyadic points and n <= n_max."""
    rng = random.Random(rng_seed)
    fn = F.fn if isinstance(F, Realizer) else F
    fails = []
    for _ in range(samples):
        x = Fraction(rng.randrange((1 << (n_max + 8)) + 1), 1 << (n_max + 8))
        out = fn(real_name(zeta, x, n_max + 4))
        for n in range(n_max + 1):
            try:
                y = xi.decode(out, n)
            except InsufficientInput:
                fails.append((str(x), n, f"only {len(out)} output bits"))
                break
            if abs(Fraction(y) - x) > _pow2(n):
                fails.append((str(x), n, f"decoded {y}"))
    cert = None
    if isinstance(F, Realizer) and F.modulus is not None:
        cert = certify_modulus(F.fn, F.modulus, cert_n_max if cert_n_max is not None else n_max,
                               trials, rng_seed, zeta, subject=F.name)
    return ReductionReport(zeta.name, xi.name, samples, n_max, fails, cert)


def empirical_modulus(F: Callable[[Word], Word], names: Sequence[Word], m_max: int) -> GrowthFn:
    """m -> the most input bits any sample needs for m output bits."""
    vals = []
    for m in range(m_max + 1):
        need = 0
        for w in names:
            L = min_input_length(F, w, m)
            if L is None:
                raise InsufficientInput(f"a sample name yields fewer than {m} output bits")
            need = max(need, L)
        vals.append(need)
    return table(vals)


# bound calculators

def main_forward_bound(kappa: GrowthFn, mu: GrowthFn, lam: GrowthFn, C: int = 0) -> GrowthFn:
    """Realizer modulus kappa(1 + mu(loinv(lam)(n) + C)) from a modulus mu of f."""
    lo = lower_semi_inverse(lam)
    return from_fn(lambda n: kappa(1 + mu(lo(n) + C)), f"fwd[{kappa.name},{mu.name},{lam.name},{C}]")


def main_backward_bound(kappa: GrowthFn, nu: GrowthFn, lam: GrowthFn, C: int = 0) -> GrowthFn:
    """Modulus loinv(kappa)(nu(lam(n + 1))) + C of f from a realizer modulus nu."""
    lo = lower_semi_inverse(kappa)
    return from_fn(lambda n: lo(nu(lam(n + 1))) + C, f"bwd[{kappa.name},{nu.name},{lam.name},{C}]")


def roundtrip_shift(mu: GrowthFn, kappa: GrowthFn, lam: GrowthFn, C: int, N: int,
                    C_max: int = 1 << 10) -> int | None:
    """Least C' with bwd(fwd(mu))(n) <= mu(n + C') + C' for all n <= N."""
    back = main_backward_bound(kappa, main_forward_bound(kappa, mu, lam, C), lam, C)
    vals = [back(n) for n in range(N + 1)]
    for Cp in range(C_max + 1):
        if all(v <= mu(n + Cp) + Cp for n, v in enumerate(vals)):
            return Cp
    return None


# admissibility audits

def _as_growth(eta) -> GrowthFn:
    if isinstance(eta, EntropyProfile):
        return table([eta.eta(n)[1] for n in eta.ns])
    return eta


@dataclass
class RivalCheck:
    rival: str
    reduction: ReductionReport
    reduction_modulus: list[int]
    composed: list[int]
    witness: ClassWitness

    @property
    def holds(self) -> bool:
        return self.reduction.passes and self.witness.holds


@dataclass
class AdmissibilityReport:
    subject: str
    form: str
    condition_i: ClassWitness
    condition_ii: list[RivalCheck]
    scope: str = ("corroboration: condition (ii) checked against the listed rival "
                  "representations only, on sampled points and finitely many n")

    @property
    def holds(self) -> bool:
        return self.condition_i.holds and all(r.holds for r in self.condition_ii)

    def to_dict(self) -> dict:
        return {"subject": self.subject, "form": self.form, "scope": self.scope,
                "verdict": "corroborated" if self.holds else "not corroborated",
                "condition_i": asdict(self.condition_i),
                "condition_ii": [{"rival": r.rival, "holds": r.holds,
                                  "reduction_passes": r.reduction.passes,
                                  "reduction_modulus": r.reduction_modulus,
                                  "composed": r.composed,
                                  "witness": asdict(r.witness)} for r in self.condition_ii]}

    def to_text(self) -> str:
        ci = self.condition_i
        lines = [f"{self.subject}: {self.form} admissibility "
                 f"{'corroborated' if self.holds else 'not corroborated'} ({self.scope})",
                 f"  (i)  kappa vs entropy [{ci.class_tag}]: "
                 + (f"C = {ci.constant} up to n = {ci.checked_up_to}" if ci.holds
                    else f"no C <= {ci.constant} (fails at n = {ci.counterexample})")]
        for r in self.condition_ii:
            w = r.witness
            lines.append(f"  (ii) {r.rival}: reduction {'ok' if r.reduction.passes else 'FAILED'}, "
                         f"composed [{w.class_tag}] " + (f"C = {w.constant}" if w.holds else "fails"))
        return "\n".join(lines)


_FORMS = {"linear": ("O-S", "O"), "polynomial": ("P-O", "P")}


def audit_admissibility(xi: RealRep, eta, suite: Sequence[RealRep], form: str = "linear",
                        N: int = 1 << 12, C_max: int = 1 << 10, n_max: int = 8,
                        samples: int = 12, rng_seed: int = 0) -> AdmissibilityReport:
    """Condition (i): kappa against the entropy in the chosen form, for n <= N.
    Condition (ii): for each rival zeta, a reduction zeta -> xi is built from
    approximations, checked for correctness, and its empirical modulus mu
    composed with kappa is compared with zeta's modulus for n <= n_max."""
    tag_i, tag_ii = _FORMS[form]
    kappa = xi.modulus
    cond_i = find_class_constant(kappa, _as_growth(eta), tag_i, N, C_max)
    rng = random.Random(rng_seed)
    checks = []
    for zeta in suite:
        F = make_reduction(zeta, xi)
        rep = verify_reduction(zeta, xi, F, samples=samples, n_max=n_max, rng_seed=rng.randrange(1 << 30))
        m_max = kappa(n_max)
        xs = [Fraction(rng.randrange((1 << (n_max + 8)) + 1), 1 << (n_max + 8)) for _ in range(samples)]
        names = []
        for x in xs:
            k = n_max
            while True:
                w = real_name(zeta, x, k)
                if len(F(w)) >= m_max:
                    names.append(w)
                    break
                k += 2
        mu = empirical_modulus(F.fn, names, m_max)
        composed = [mu(kappa(n)) for n in range(n_max + 1)]
        wit = find_class_constant(table(composed), zeta.modulus, tag_ii, n_max, C_max)
        checks.append(RivalCheck(zeta.name, rep, [mu(m) for m in range(m_max + 1)], composed, wit))
    return AdmissibilityReport(xi.name, form, cond_i, checks)
