"""Displacement norms |f^n| = max_x d(x, f^n x), recurrence, minimality,
near-asymptotic pair scans and expansivity of the cyclic group <f>."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gamma import orbit_extrema
from .systems import DynSystem

__all__ = [
    "CapExceeded",
    "RecurrenceProfile",
    "GroupExpansivityReport",
    "displacement_sequence",
    "displacement_direct",
    "recurrence_profile",
    "cyclic_group_expansivity",
    "minimality",
    "asymptotic_scan",
]

DEFAULT_MAX_ORDER = 10**7
DEFAULT_MAX_GROUP_ENTRIES = 10**6


class CapExceeded(ValueError):
    """The order of f is too large to enumerate under the configured cap."""


def _cycle_shift_maxima(sys: DynSystem) -> dict[int, np.ndarray]:
    # length -> array r -> max over cycles of that length of max_i d(c_i, c_{i+r})
    out: dict[int, np.ndarray] = {}
    for cyc in sys.orbits.cycles:
        c = np.asarray(cyc)
        k = len(c)
        idx = (np.arange(k)[:, None] + np.arange(k)[None, :]) % k  # [r, i] -> i + r
        disp = sys.dist[c[None, :].repeat(k, 0), c[idx]].max(axis=1)
        prev = out.get(k)
        out[k] = disp if prev is None else np.maximum(prev, disp)
    return out


def displacement_sequence(sys: DynSystem, max_order: int = DEFAULT_MAX_ORDER) -> np.ndarray:
    """|f^n| for n = 1..L, from per-cycle shift maxima."""
    L = sys.orbits.L
    if L > max_order:
        raise CapExceeded(f"order L = {L} exceeds the cap {max_order}")
    n = np.arange(1, L + 1)
    out = np.zeros(L)
    for k, disp in _cycle_shift_maxima(sys).items():
        np.maximum(out, disp[n % k], out=out)
    return out


def displacement_direct(sys: DynSystem, n: int) -> float:
    """|f^n| = max_x d(x, f^n(x)) by iterating the map."""
    img = np.arange(sys.n)
    for _ in range(n % sys.orbits.L):
        img = sys.map[img]
    return float(sys.dist[np.arange(sys.n), img].max())


@dataclass(frozen=True, eq=False)
class RecurrenceProfile:
    L: int
    displacement: np.ndarray  # displacement[n - 1] = |f^n|
    minimal_n: dict[float, int]

    def norm(self, n: int) -> float:
        """|f^n| for any integer n."""
        r = n % self.L
        return 0.0 if r == 0 else float(self.displacement[r - 1])

    def to_dict(self) -> dict:
        return {
            "L": self.L,
            "displacement": self.displacement.tolist(),
            "minimal_n": [{"epsilon": e, "n": k} for e, k in self.minimal_n.items()],
            "recurrent": True,
            "recurrence_witness": self.L,
        }


def recurrence_profile(sys: DynSystem, eps_list=(), max_order: int = DEFAULT_MAX_ORDER) -> RecurrenceProfile:
    """Displacement sequence and, per epsilon, the least n >= 1 with |f^n| < epsilon.

    n = L always qualifies (f^L is the identity), so every finite system is
    recurrent.
    """
    eps_list = [float(e) for e in eps_list]
    if any(not e > 0 for e in eps_list):
        raise ValueError("recurrence epsilons must be positive")
    disp = displacement_sequence(sys, max_order)
    L = sys.orbits.L
    minimal = {}
    for e in eps_list:
        hits = np.flatnonzero(disp < e)
        minimal[e] = int(hits[0]) + 1
    disp.setflags(write=False)
    return RecurrenceProfile(L, disp, minimal)


@dataclass(frozen=True)
class GroupExpansivityReport:
    eps_grid: tuple[float, ...]
    delta_grid: tuple[float, ...]
    verdict: tuple[bool, ...]
    best_delta: tuple[float | None, ...]  # largest working delta per epsilon

    @property
    def overall(self) -> bool:
        return all(self.verdict)

    def to_dict(self) -> dict:
        return {
            "eps_grid": list(self.eps_grid),
            "delta_grid": list(self.delta_grid),
            "verdict": [
                {"epsilon": e, "verdict": v, "delta": d}
                for e, v, d in zip(self.eps_grid, self.verdict, self.best_delta)
            ],
            "overall": self.overall,
        }


def _materialize_group(sys: DynSystem, max_entries: int) -> np.ndarray:
    L, n = sys.orbits.L, sys.n
    if L * n > max_entries:
        raise CapExceeded(f"group <f> has {L} elements on {n} points; {L * n} entries exceed the cap {max_entries}")
    G = np.empty((L, n), dtype=np.int64)
    G[0] = np.arange(n)
    for t in range(1, L):
        G[t] = sys.map[G[t - 1]]
    return G


def cyclic_group_expansivity(
    sys: DynSystem,
    eps_grid=None,
    delta_grid=None,
    max_entries: int = DEFAULT_MAX_GROUP_ENTRIES,
) -> GroupExpansivityReport:
    """Grid check of: for each eps some delta makes every pair that stays
    delta-close under all of <f> related by some g in <f> with |g| < eps.

    Default grids are the distinct positive pairwise distances (delta) and
    these together with the positive norms |f^n| (eps).
    """
    n = sys.n
    G = _materialize_group(sys, max_entries)
    rows = np.arange(n)
    norms = sys.dist[rows[None, :], G].max(axis=1)

    # closeness under the whole group, exhaustively
    close = np.zeros((n, n))
    for g in G:
        np.maximum(close, sys.dist[np.ix_(g, g)], out=close)
    # least norm of a group element sending x to y (inf if none)
    least = np.full((n, n), np.inf)
    np.minimum.at(least, (np.tile(rows, len(G)), G.ravel()), np.repeat(norms, n))

    dists = [float(v) for v in sys.space.distinct_distances]
    if delta_grid is None:
        delta_grid = dists
    if eps_grid is None:
        eps_grid = sorted(set(dists) | {float(v) for v in norms if v > 0})
    eps_grid = tuple(sorted(float(e) for e in eps_grid))
    delta_grid = tuple(sorted(float(d) for d in delta_grid))
    if any(not e > 0 for e in eps_grid) or any(not d > 0 for d in delta_grid):
        raise ValueError("grid resolutions must be positive")

    verdict, best = [], []
    for e in eps_grid:
        bad = least >= e
        # delta works iff no bad pair is delta-close, i.e. delta <= min closeness of bad pairs
        limit = close[bad].min() if bad.any() else np.inf
        ok = [d for d in delta_grid if d <= limit]
        verdict.append(bool(ok))
        best.append(ok[-1] if ok else None)
    return GroupExpansivityReport(eps_grid, delta_grid, tuple(verdict), tuple(best))


def minimality(sys: DynSystem) -> tuple[bool, int]:
    """On a finite space f is minimal iff a single cycle covers everything."""
    count = sys.orbits.count
    return count == 1, count


def asymptotic_scan(sys: DynSystem, delta) -> list[tuple[tuple[int, int], float]]:
    """Pairs x < y whose closest approach over one pair period is <= delta."""
    delta = float(delta)
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta!r}")
    _, inf = orbit_extrema(sys)
    xs, ys = np.nonzero(np.triu(inf <= delta, k=1))
    return [((int(x), int(y)), float(inf[x, y])) for x, y in zip(xs, ys)]
