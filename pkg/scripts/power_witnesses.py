"""Tabulate the f^k non-separation witnesses for a grid of (k, m)."""

import sys

from sepdyn import gen_power_witness


def main(kmax=4, mmax=3):
    print(f"{'k':>2} {'m':>2} {'period':>7} {'shift':>5} {'f^k cycles':>11}  sup distance")
    for k in range(2, kmax + 1):
        for m in range(1, mmax + 1):
            w = gen_power_witness(k, m)
            lengths = w.checks["distinct_power_cycles"]["power_cycle_lengths"]
            print(f"{k:>2} {m:>2} {w.claimed_period:>7} {w.claimed_shift:>5} {str(lengths):>11}  {w.sup_orbit_distance_exact}")


if __name__ == "__main__":
    main(*map(int, sys.argv[1:3]))
