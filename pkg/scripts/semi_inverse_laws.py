"""Count violations of the semi-inverse laws over random monotone tables."""
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from lawsuite import injective_equality_violations, law_violations  # noqa: E402


def main(batches: int = 10, size: int = 10_000, seed: int = 0) -> None:
    rng = np.random.default_rng(seed)
    total: dict[str, int] = {}
    for _ in range(batches):
        for k, v in law_violations(rng, size).items():
            total[k] = total.get(k, 0) + v
    total["equality for injective tables"] = sum(injective_equality_violations(rng, size)
                                                 for _ in range(batches))
    print(f"{batches * size} tables")
    for k, v in total.items():
        print(f"{v:>9}  {k}")


if __name__ == "__main__":
    main()
