"""Dynamical balls: Gamma_eta(x) = {y : d(f^k x, f^k y) <= eta for all k}.

:func:`gamma_profile` computes every Gamma_eta(x) at once as the greatest
subset of ``{(x, y) : d(x, y) <= eta}`` closed under the pair map
``(x, y) -> (f x, f y)`` and its inverse.  :func:`gamma_oracle` is the
brute-force time walk used to check it.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .systems import DynSystem

__all__ = [
    "GammaProfile",
    "gamma_profile",
    "gamma_oracle",
    "pair_orbit_distances",
    "orbit_extrema",
]


def _check_eta(eta) -> float:
    eta = float(eta)
    if not eta >= 0:
        raise ValueError(f"eta must be non-negative, got {eta!r}")
    return eta


@dataclass(frozen=True, eq=False)
class GammaProfile:
    eta: float
    matrix: np.ndarray  # matrix[x, y] <=> y in Gamma_eta(x)

    @property
    def members(self) -> list[list[int]]:
        return [np.flatnonzero(row).tolist() for row in self.matrix]

    @property
    def cards(self) -> np.ndarray:
        return self.matrix.sum(axis=1)

    @property
    def max_card(self) -> int:
        return int(self.cards.max())

    @property
    def card_histogram(self) -> dict[int, int]:
        return dict(sorted(Counter(self.cards.tolist()).items()))

    def __eq__(self, other):
        if not isinstance(other, GammaProfile):
            return NotImplemented
        return self.eta == other.eta and np.array_equal(self.matrix, other.matrix)

    __hash__ = None

    def to_dict(self) -> dict:
        return {
            "eta": self.eta,
            "members": self.members,
            "max_card": self.max_card,
            "card_histogram": {str(k): v for k, v in self.card_histogram.items()},
        }


def _profile(eta: float, matrix: np.ndarray) -> GammaProfile:
    matrix = np.ascontiguousarray(matrix, dtype=bool)
    matrix.setflags(write=False)
    return GammaProfile(eta, matrix)


def gamma_profile(sys: DynSystem, eta) -> GammaProfile:
    """All Gamma_eta(x) via a deletion worklist on the n*n pair set.

    A pair survives iff its whole pair orbit stays within ``eta``; deleting a
    pair deletes its image and preimage, so each pair is touched at most once.
    """
    eta = _check_eta(eta)
    n = sys.n
    p, q = sys.map, sys.inverse
    alive = (sys.dist <= eta).ravel()
    succ = (p[:, None] * n + p[None, :]).ravel()
    pred = (q[:, None] * n + q[None, :]).ravel()
    seeds = np.flatnonzero(alive & ~(alive[succ] & alive[pred]))

    live = alive.tolist()
    s, r = succ.tolist(), pred.tolist()
    stack = seeds.tolist()
    for z in stack:
        live[z] = False
    while stack:
        z = stack.pop()
        w = s[z]
        if live[w]:
            live[w] = False
            stack.append(w)
        w = r[z]
        if live[w]:
            live[w] = False
            stack.append(w)
    return _profile(eta, np.array(live, dtype=bool).reshape(n, n))


def gamma_oracle(sys: DynSystem, eta) -> GammaProfile:
    """Brute force: max distance along each pair orbit, compared with ``eta``.

    All pairs are walked together for T steps, T the largest pair period
    lcm(period(x), period(y)); a pair with a shorter period just revisits
    states it has already seen, so the maximum is unchanged.
    """
    eta = _check_eta(eta)
    d = sys.dist
    periods = sorted(set(sys.orbits.period_of.tolist()))
    steps = max(math.lcm(a, b) for a in periods for b in periods)
    sup = d.copy()
    xt = np.arange(sys.n)
    for _ in range(steps - 1):
        xt = sys.map[xt]
        np.maximum(sup, d[np.ix_(xt, xt)], out=sup)
    return _profile(eta, sup <= eta)


def pair_orbit_distances(sys: DynSystem, x: int, y: int) -> list[float]:
    """d(f^t x, f^t y) for t over one full period of the pair (x, y)."""
    px, py = int(sys.orbits.period_of[x]), int(sys.orbits.period_of[y])
    out = []
    for _ in range(math.lcm(px, py)):
        out.append(float(sys.dist[x, y]))
        x, y = int(sys.map[x]), int(sys.map[y])
    return out


def orbit_extrema(sys: DynSystem) -> tuple[np.ndarray, np.ndarray]:
    """(sup, inf) over time of d(f^t x, f^t y), for every pair.

    For cycles A, B of lengths a, b with g = gcd(a, b), the pair orbit of
    (A[i], B[j]) is exactly the positions with the same (j - i) mod g.
    """
    orb = sys.orbits
    n = sys.n
    sup = np.empty((n, n))
    inf = np.empty((n, n))
    cycles = [np.asarray(c) for c in orb.cycles]
    for ca in cycles:
        for cb in cycles:
            a, b = len(ca), len(cb)
            g = math.gcd(a, b)
            sub = sys.dist[np.ix_(ca, cb)]
            key = (np.arange(b)[None, :] - np.arange(a)[:, None]) % g
            hi = np.full(g, -np.inf)
            lo = np.full(g, np.inf)
            np.maximum.at(hi, key.ravel(), sub.ravel())
            np.minimum.at(lo, key.ravel(), sub.ravel())
            sup[np.ix_(ca, cb)] = hi[key]
            inf[np.ix_(ca, cb)] = lo[key]
    return sup, inf
