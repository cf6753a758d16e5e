"""Covering counts and entropy brackets for the bundled test spaces."""
from qadmit.entropy import (cantor_truncation, entropy_profile, grid, hilbert_truncated,
                            resolution_limit)


def show(label, S):
    prof = entropy_profile(S, resolution_limit(S))
    print(f"{label} ({len(S)} points)")
    print("  n  cover_lo  cover_hi  eta")
    for r in prof.as_rows():
        eta = r["eta_lo"] if r["eta_lo"] == r["eta_hi"] else f"{r['eta_lo']}..{r['eta_hi']}"
        print(f"{r['n']:>3}  {r['covering_lo']:>8}  {r['covering_hi']:>8}  {eta}")
    print(f"  sandwich violations: {prof.sandwich_violations()}")


if __name__ == "__main__":
    show("grid(8)", grid(8))
    show("Cantor words of length 7", cantor_truncation(7))
    show("Hilbert cube, 3 components", hilbert_truncated(3))
