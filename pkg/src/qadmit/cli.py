"""Command-line entry point: ``qadmit <subcommand> ...``.

Every subcommand prints a text or JSON report and exits with
0 on success, 2 on a precondition failure, 3 when a check finds a
violation and 4 on I/O errors. Errors go to stderr as one JSON line.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .cantor import check_word, format_dyadic
from .constructions import (GridBinaryRep, LipschitzNets, ProductSchedule, application_signed,
                            application_values, lipschitz_encode, random_lipschitz_on_grid)
from .entropy import LineGrid, entropy_profile, grid, load_space
from .harness import (audit_admissibility, encode_into, main_backward_bound, main_forward_bound,
                      roundtrip_shift)
from .moduli import from_fn, parse_growth, poly
from .reps import RealRep
from .standard_rep import (StandardPointRep, StandardRealRep, build_covering_family, donghyun_phi,
                           kappa_phi_bound_check, named_eta, point_oracle)
from .unit_interval import (BinaryRep, DyadicRep, PointApprox, SignedRep, SigmaPhiRep, average_word,
                            signed_decode, signed_encode_exact, signed_to_text, text_to_signed)

N_CEILING = 1 << 12
BUNDLED_GRID = "grid8.json"

EXIT_OK, EXIT_PRECONDITION, EXIT_VIOLATION, EXIT_IO = 0, 2, 3, 4


@dataclass
class RunConfig:
    subcommand: str
    inputs: list[str] = field(default_factory=list)
    n_max: int | None = None
    seed: int = 0
    exact_limit: int = 24
    output: str | None = None
    format: str = "text"

    def __post_init__(self):
        for p in self.inputs:
            if not Path(p).is_file():
                raise FileNotFoundError(p)
        if self.n_max is not None and not 0 <= self.n_max <= N_CEILING:
            raise ValueError(f"--n-max must lie in 0..{N_CEILING}")


# helpers

def _read_name(arg: str) -> str:
    """A name given inline or as a path to a file holding it."""
    p = Path(arg)
    if p.is_file():
        return p.read_text().strip()
    return arg.strip()


def _eta(spec: str):
    try:
        return named_eta(spec)
    except ValueError:
        return parse_growth(spec)


def _real_rep(kind: str, phi: str | None) -> RealRep:
    if kind == "binary":
        return BinaryRep()
    if kind == "dyadic":
        return DyadicRep()
    if kind == "signed":
        return SignedRep()
    if kind == "sigma_phi":
        return SigmaPhiRep(parse_growth(phi or "poly 1 2"))
    raise ValueError(f"unknown representation {kind!r}")


def _text_name(rep: RealRep, w: str) -> str:
    return signed_to_text(w) if isinstance(rep, SignedRep) else w


def _parse_name(rep: RealRep, s: str) -> str:
    if isinstance(rep, SignedRep):
        return text_to_signed(s)
    s = "".join(s.split())
    check_word(s)
    return s


def _short(x: Fraction) -> str:
    """Exact dyadic when short, a decimal otherwise (text reports only)."""
    return format_dyadic(x) if x.denominator <= 1 << 64 else f"~{float(x):.12f}"


def _kv(rows: list[tuple[str, object]]) -> str:
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


# subcommands; each returns (payload, text, ok)

def _signed_arg(arg: str, digits: int) -> str:
    """'=q' encodes the rational q in [0;1]; anything else is a name or file."""
    if arg.startswith("="):
        q = Fraction(arg[1:])
        if not 0 <= q <= 1:
            raise ValueError(f"{q} outside [0;1]")
        return signed_encode_exact(q, digits)
    return text_to_signed(_read_name(arg))


def cmd_avg(cfg: RunConfig, a):
    digits = (24 if cfg.n_max is None else cfg.n_max) + 1
    x, y = _signed_arg(a.x, digits), _signed_arg(a.y, digits)
    out = average_word(x, y)
    n = len(out) // 2 if cfg.n_max is None else min(cfg.n_max, len(out) // 2)
    v = signed_decode(out, n)
    payload = {"x": signed_to_text(x), "y": signed_to_text(y), "avg": signed_to_text(out),
               "avg_bits": out, "digits": n, "value": format_dyadic(v), "error_bound": f"1/2^{n}"}
    text = _kv([("x", payload["x"]), ("y", payload["y"]), ("avg", payload["avg"]),
                (f"value({n})", f"{payload['value']}  (within 2^-{n})")])
    return payload, text, True


def cmd_convert(cfg: RunConfig, a):
    src = _real_rep(a.source, a.phi)
    dst = _real_rep(a.target, a.phi)
    if isinstance(dst, BinaryRep):
        raise ValueError("binary expansion has no continuous encoder; pick another target")
    w = _parse_name(src, _read_name(a.name))
    out = encode_into(dst, PointApprox.from_prefix(src, w))
    lo, hi = dst.image(out)
    payload = {"from": src.name, "to": dst.name, "input": _text_name(src, w),
               "output": _text_name(dst, out), "output_bits": out,
               "interval": [format_dyadic(lo), format_dyadic(hi)]}
    text = _kv([("from", f"{src.name}  {payload['input']}"),
                ("to", f"{dst.name}  {payload['output']}"),
                ("interval", f"[{_short(lo)}; {_short(hi)}]")])
    return payload, text, True


def cmd_entropy(cfg: RunConfig, a):
    if cfg.inputs:
        text_in, source = Path(cfg.inputs[0]).read_text(), cfg.inputs[0]
    else:
        text_in = resources.files("qadmit").joinpath("data", BUNDLED_GRID).read_text()
        source = f"bundled:{BUNDLED_GRID}"
    S = load_space(text_in)
    n_max = 8 if cfg.n_max is None else cfg.n_max
    prof = entropy_profile(S, n_max, cfg.exact_limit, n_min=a.n_min)
    rows = prof.as_rows()
    payload = {"space": source, "points": len(S), "rows": rows,
               "sandwich_violations": prof.sandwich_violations()}
    lines = [f"space {source} ({len(S)} points)", " n  eta(n)  covering      capacity"]
    for r in rows:
        eta = str(r["eta_lo"]) if r["eta_lo"] == r["eta_hi"] else f"{r['eta_lo']}..{r['eta_hi']}"
        cov = str(r["covering_lo"]) if r["covering_lo"] == r["covering_hi"] \
            else f"{r['covering_lo']}..{r['covering_hi']}"
        cap = str(r["capacity_lo"]) if r["capacity_lo"] == r["capacity_hi"] \
            else f"{r['capacity_lo']}..{r['capacity_hi']}"
        lines.append(f"{r['n']:>2}  {eta:>6}  {cov:<12}  {cap}")
    ok = not payload["sandwich_violations"]
    if not ok:
        lines.append(f"sandwich violated at n = {payload['sandwich_violations']}")
    return payload, "\n".join(lines), ok


def cmd_donghyun(cfg: RunConfig, a):
    eta = _eta(a.eta)
    c = Fraction(a.c)
    n_max = 4096 if cfg.n_max is None else cfg.n_max
    sched = donghyun_phi(eta, c, n_max)
    shifted = donghyun_phi(from_fn(lambda n: eta(n + 1), f"{eta.name}(n+1)"), c, n_max)
    bound_fail = kappa_phi_bound_check(eta, shifted, n_max)
    payload = {"eta": eta.name, "n_max": n_max, **sched.to_dict(),
               "sum_bound": {"schedule": shifted.values, "holds": bound_fail is None,
                             "first_failure": bound_fail, "constant": str(c ** 3 / (c - 1))}}
    labels = {"a": "(a) eta(phi(m+1)) <= c^2 eta(phi(m)+1)",
              "b": "(b) c eta(phi(m)) <= eta(phi(m+1))",
              "c": "(c) c eta(phi(m)+1) <= eta(phi(m+1)+1)",
              "d": "(d) sum_{m <= loinv phi(n)} eta(phi(m)) <= c^3/(c-1) eta(n)"}
    lines = [f"eta = {eta.name}, c = {c}, checked to n = {n_max}",
             f"phi = {sched.values}"]
    for k in "abcd":
        good = sched.verified_conditions[k]
        lines.append(f"{'PASS' if good else 'FAIL'}  {labels[k]}"
                     + ("" if good else f"  (first failure at {sched.first_failure[k]})"))
    lines.append(f"{'PASS' if bound_fail is None else 'FAIL'}  "
                 f"kappa^phi(n) <= {c ** 3 / (c - 1)} eta(n+1) for the schedule built on eta(n+1)")
    return payload, "\n".join(lines), sched.ok and bound_fail is None


def cmd_standard(cfg: RunConfig, a):
    n_max = 8 if cfg.n_max is None else cfg.n_max
    S = grid(a.k)
    fam = build_covering_family(S, None, n_max + 1, cfg.exact_limit)
    phi = None
    if a.phi_eta:
        phi = donghyun_phi(_eta(a.phi_eta), Fraction(3, 2), n_max + 1).phi
    R = StandardPointRep(fam, phi)
    rng = random.Random(cfg.seed)
    pts = [a.point] if a.point is not None else [rng.randrange(len(S)) for _ in range(a.points)]
    blocks = R.blocks_for(n_max) + 1
    rows, ok = [], True
    for x in pts:
        if not 0 <= x < len(S):
            raise ValueError(f"point index {x} outside 0..{len(S) - 1}")
        w = R.encode_word(point_oracle(fam, x), blocks)
        errs = [S.dist(R.decode(w, n), x) for n in range(n_max + 1)]
        good = all(e <= Fraction(1, 1 << n) for n, e in enumerate(errs))
        ok &= good
        rows.append({"point": x, "label": format_dyadic(S.labels[x]), "name": w,
                     "decoded": [format_dyadic(S.labels[R.decode(w, n)]) for n in range(n_max + 1)],
                     "roundtrip_ok": good})
    if a.family_out:
        Path(a.family_out).write_text(fam.to_json())
    payload = {"space": f"grid({a.k})", "rep": R.name, "n_max": n_max,
               "code_lens": fam.code_lens, "kappa": [R.modulus(n) for n in range(n_max + 1)],
               "covering_ok": not fam.verify_covering(), "points": rows}
    ok &= payload["covering_ok"]
    lines = [f"{R.name} over grid({a.k}), n <= {n_max}",
             f"kappa = {payload['kappa']}",
             f"covering levels sound: {payload['covering_ok']}"]
    for r in rows:
        lines.append(f"x = {r['label']:<10} name = {r['name']}  "
                     f"roundtrip {'ok' if r['roundtrip_ok'] else 'FAILED'}")
    return payload, "\n".join(lines), ok


def cmd_schedule(cfg: RunConfig, a):
    depth = 12 if cfg.n_max is None else cfg.n_max
    specs = a.kappa or ["linear 2"]
    kappas = [parse_growth(specs[j % len(specs)]) for j in range(a.components)]
    sched = ProductSchedule(kappas, depth)
    problems = sched.verify()
    payload = {**json.loads(sched.to_json()), "kappa": [sched.kappa(n) for n in range(depth + 1)],
               "problems": problems}
    lines = [f"{a.components} components, depth {depth}, kappa_j = {[k.name for k in kappas]}",
             f"kappa(n) = {payload['kappa']}", "round  bits  layout (component:bit)"]
    for n in range(1, depth + 1):
        lo, hi = sched.round_ends[n - 1], sched.round_ends[n]
        cells = " ".join(f"{j}:{i}" for j, i in sched.positions[lo:hi])
        lines.append(f"{n:>5}  {lo:>4}  {cells}")
    lines.append("bijection verified" if not problems else "problems: " + "; ".join(problems))
    return payload, "\n".join(lines), not problems


def cmd_apply(cfg: RunConfig, a):
    n_max = 8 if cfg.n_max is None else cfg.n_max
    k = max(a.k, n_max + 6)  # the signed output reads y up to n + 6
    S = LineGrid(k)
    base = GridBinaryRep(S, k)
    nets = LipschitzNets(base, k)
    rng = random.Random(cfg.seed)
    rows, ok = [], True
    for _ in range(a.pairs):
        f = random_lipschitz_on_grid(rng, k)
        code = lipschitz_encode(f, nets)
        j = rng.randrange(len(S))
        xn = base.name_of(j, nets.prefix_length(k))
        ys = application_values(code, xn, nets, n_max)
        s = application_signed(code, xn, nets, n_max)
        fx = f[j]
        y_ok = all(abs(y - fx) <= Fraction(8, 1 << n) for n, y in enumerate(ys))
        s_ok = all(abs(signed_decode(s, n) - fx) <= Fraction(1, 1 << n) for n in range(n_max + 1))
        ok &= y_ok and s_ok
        rows.append({"x": format_dyadic(S.labels[j]), "f(x)": format_dyadic(fx),
                     "y": [format_dyadic(y) for y in ys], "sigma": signed_to_text(s),
                     "y_bound_ok": y_ok, "sigma_ok": s_ok, "code_bits": len(code)})
    if a.nets_out:
        Path(a.nets_out).write_text(nets.to_json())
    payload = {"grid": k, "n_max": n_max, "net_sizes": [nets.level(n).size for n in range(k + 1)],
               "pairs": rows}
    lines = [f"line grid 2^{k}+1 points, n <= {n_max}"]
    for r in rows:
        lines.append(f"x = {r['x']:<12} f(x) = {r['f(x)']:<12} y_{n_max} = {r['y'][-1]:<12} "
                     f"sigma = {r['sigma']}  {'ok' if r['y_bound_ok'] and r['sigma_ok'] else 'FAILED'}")
    return payload, "\n".join(lines), ok


def cmd_audit(cfg: RunConfig, a):
    eta = from_fn(lambda n: max(n - 1, 0), "max(n-1,0)")
    if a.rep == "signed":
        xi, suite = SignedRep(), [DyadicRep(), BinaryRep(), SigmaPhiRep(poly(1, 2))]
    elif a.rep == "dyadic":
        xi, suite = DyadicRep(), [SignedRep(), BinaryRep(), SigmaPhiRep(poly(1, 2))]
    else:
        sched = donghyun_phi(from_fn(lambda n: n + 1, "n+1"), Fraction(3, 2), 4096)
        xi, suite = StandardRealRep(sched.phi), [SignedRep(), DyadicRep(), BinaryRep()]
    n_max = 6 if cfg.n_max is None else cfg.n_max
    rep = audit_admissibility(xi, eta, suite, a.form, n_max=n_max, samples=a.samples,
                              rng_seed=cfg.seed)
    return rep.to_dict(), rep.to_text(), rep.holds


def cmd_bounds(cfg: RunConfig, a):
    kappa, mu, lam = parse_growth(a.kappa), parse_growth(a.mu), parse_growth(a.lam)
    n_max = 16 if cfg.n_max is None else cfg.n_max
    fwd = main_forward_bound(kappa, mu, lam, a.C)
    back = main_backward_bound(kappa, fwd, lam, a.C)
    Cp = roundtrip_shift(mu, kappa, lam, a.C, n_max)
    payload = {"kappa": kappa.name, "mu": mu.name, "lambda": lam.name, "C": a.C,
               "forward": [fwd(n) for n in range(n_max + 1)],
               "backward": [back(n) for n in range(n_max + 1)],
               "mu": [mu(n) for n in range(n_max + 1)], "roundtrip_shift": Cp}
    lines = [f"kappa = {kappa.name}, mu = {mu.name}, lambda = {lam.name}, C = {a.C}",
             " n   mu(n)  forward  backward"]
    for n in range(n_max + 1):
        lines.append(f"{n:>2}  {payload['mu'][n]:>6}  {payload['forward'][n]:>7}  {payload['backward'][n]:>8}")
    lines.append(f"backward(forward(mu))(n) <= mu(n + C') + C' with C' = {Cp}" if Cp is not None
                 else "no constant shift found")
    return payload, "\n".join(lines), Cp is not None


COMMANDS = {"avg": cmd_avg, "convert": cmd_convert, "entropy": cmd_entropy, "donghyun": cmd_donghyun,
            "standard": cmd_standard, "schedule": cmd_schedule, "apply": cmd_apply,
            "audit": cmd_audit, "bounds": cmd_bounds}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n-max", type=int, default=None,
                        help="largest precision level n (default depends on the subcommand)")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled inputs (default 0)")
    common.add_argument("--exact-limit", type=int, default=24,
                        help="largest space searched exactly for covers and packings (default 24)")
    common.add_argument("--format", choices=["text", "json"], default="text", help="report format (default text)")
    common.add_argument("--output", "-o", default=None, help="write the report here instead of stdout")

    p = argparse.ArgumentParser(prog="qadmit", description="Quantitative representation experiments.")
    sub = p.add_subparsers(dest="subcommand", required=True)

    s = sub.add_parser("avg", parents=[common], help="average two signed-digit names (n-max: output digits)")
    s.add_argument("x", help="name or file (digits -,0,+ or raw bit pairs), or =q for a rational q")
    s.add_argument("y")

    s = sub.add_parser("convert", parents=[common], help="convert a name between representations of [0;1]")
    s.add_argument("--from", dest="source", required=True, choices=["binary", "dyadic", "signed", "sigma_phi"])
    s.add_argument("--to", dest="target", required=True, choices=["dyadic", "signed", "sigma_phi"])
    s.add_argument("--phi", default=None, help="growth literal for sigma_phi (default 'poly 1 2')")
    s.add_argument("name", help="name or file")

    s = sub.add_parser("entropy", parents=[common], help="entropy profile of a JSON space (default: bundled grid, n-max 8)")
    s.add_argument("space", nargs="?", default=None, help="JSON file with 'labels' and 'dist'")
    s.add_argument("--n-min", type=int, default=1)

    s = sub.add_parser("donghyun", parents=[common], help="subsampling schedule with its four checks (n-max 4096)")
    s.add_argument("--eta", default="id", help="id, n^3/2, n^2, 2^n/4 or a growth literal")
    s.add_argument("--c", default="3/2", help="ratio c > 1 (default 3/2)")

    s = sub.add_parser("standard", parents=[common], help="standard representation of a grid: encode and decode (n-max 8)")
    s.add_argument("--k", type=int, default=8, help="grid of 2^k + 1 points (default 8)")
    s.add_argument("--point", type=int, default=None, help="encode this point index only")
    s.add_argument("--points", type=int, default=5, help="number of seeded points (default 5)")
    s.add_argument("--phi-eta", default=None, help="subsample with the schedule built on this entropy")
    s.add_argument("--family-out", default=None, help="write the covering family JSON here")

    s = sub.add_parser("schedule", parents=[common], help="countable-product layout table (n-max: depth 12)")
    s.add_argument("--components", type=int, default=8)
    s.add_argument("--kappa", action="append", help="component modulus literal, repeatable (default 'linear 2')")

    s = sub.add_parser("apply", parents=[common], help="Lipschitz function application on a line grid (n-max 8)")
    s.add_argument("--k", type=int, default=10, help="grid of 2^k + 1 points (raised to n-max + 6)")
    s.add_argument("--pairs", type=int, default=5)
    s.add_argument("--nets-out", default=None, help="write the nets JSON here")

    s = sub.add_parser("audit", parents=[common], help="admissibility audit of a representation of [0;1] (n-max 6)")
    s.add_argument("--rep", choices=["signed", "dyadic", "xi-phi"], default="signed")
    s.add_argument("--form", choices=["linear", "polynomial"], default="linear")
    s.add_argument("--samples", type=int, default=8)

    s = sub.add_parser("bounds", parents=[common], help="forward/backward modulus bounds and roundtrip shift (n-max 16)")
    s.add_argument("--kappa", default="linear 2", help="modulus of the name spaces (default 'linear 2')")
    s.add_argument("--mu", default="id", help="modulus of the function (default id)")
    s.add_argument("--lam", default="linear 2", help="modulus of the metric side (default 'linear 2')")
    s.add_argument("--C", type=int, default=0)
    return p


def _fail(code: int, exc: BaseException) -> int:
    print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit": code}), file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    a = build_parser().parse_args(argv)
    inputs = [a.space] if getattr(a, "space", None) else []
    try:
        cfg = RunConfig(a.subcommand, inputs, a.n_max, a.seed, a.exact_limit, a.output, a.format)
        payload, text, ok = COMMANDS[a.subcommand](cfg, a)
        out = json.dumps(payload, sort_keys=True, indent=1) if cfg.format == "json" else text
        if cfg.output:
            Path(cfg.output).write_text(out + "\n")
        else:
            print(out)
    except OSError as e:
        return _fail(EXIT_IO, e)
    except (ValueError, LookupError, TypeError, ArithmeticError, RuntimeError) as e:
        return _fail(EXIT_PRECONDITION, e)
    return EXIT_OK if ok else EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
