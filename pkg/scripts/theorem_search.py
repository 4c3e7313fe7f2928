"""Run the separating => periodic-Gamma checks over many random systems.

Finite systems cannot decide the question for non-totally-disconnected
spaces; this only looks for counterexamples at finite scale (none are
expected) and reports how often the premise holds.

    python scripts/theorem_search.py --samples 500 --seed 1
"""

import argparse
from collections import Counter

import numpy as np

from sepdyn import gen_random, theorem_checks


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-points", type=int, default=40)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    tally = Counter()
    for k in range(args.samples):
        s = gen_random(rng, int(rng.integers(2, args.max_points + 1)))
        for q in (0.05, 0.2, 0.5):
            eta = float(np.quantile(s.space.distinct_distances, q, method="lower"))
            rep = theorem_checks(s, eta)
            tally["premise" if rep.premise_separating else "no-premise"] += 1
            if not rep.passed:
                tally["FAILED"] += 1
                print(f"sample {k} eta={eta}: {rep.to_dict()['checks']}")
    print(dict(tally))


if __name__ == "__main__":
    main()
