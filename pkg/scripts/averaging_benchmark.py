"""Time the signed-digit averaging transducer and check its outputs exactly."""
import random
import time
from fractions import Fraction

from qadmit.unit_interval import average_word, signed_decode, signed_encode_exact


def main(pairs: int = 1000, digits: int = 64, seed: int = 0) -> None:
    rng = random.Random(seed)
    worst = Fraction(0)
    t0 = time.perf_counter()
    for _ in range(pairs):
        x, y = (Fraction(rng.randrange((1 << 20) + 1), 1 << 20) for _ in range(2))
        out = average_word(signed_encode_exact(x, digits), signed_encode_exact(y, digits))
        n = len(out) // 2 - 1
        worst = max(worst, abs(signed_decode(out, n) - (x + y) / 2) * 2 ** n)
    dt = time.perf_counter() - t0
    print(f"{pairs} pairs of {digits}-digit names in {dt:.2f} s")
    print(f"worst error in units of 2^-n: {float(worst):.3f} (bound 1)")


if __name__ == "__main__":
    main()
