"""Epsilon-chain classes: x ~ y iff a chain x = z_1, ..., z_m = y has every
step d(z_k, z_{k+1}) < epsilon (strict)."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .systems import MetricSpace

__all__ = ["ChainPartition", "chain_partition", "chain_partition_bfs", "resolve_epsilon", "epsilon_candidates"]


@dataclass(frozen=True)
class ChainPartition:
    epsilon: float
    class_of: tuple[int, ...]
    classes: tuple[tuple[int, ...], ...]
    diameters: tuple[float, ...]

    @property
    def max_diameter(self) -> float:
        return max(self.diameters)

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "classes": [list(c) for c in self.classes],
            "diameters": list(self.diameters),
        }


def _check_epsilon(epsilon) -> float:
    epsilon = float(epsilon)
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    return epsilon


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            # smaller id becomes the root, so roots are class minima
            if ry < rx:
                rx, ry = ry, rx
            self.parent[ry] = rx


def _partition(space: MetricSpace, epsilon: float, roots) -> ChainPartition:
    # number classes by smallest member; ids ascend within a class
    groups: dict[int, list[int]] = {}
    for x, r in enumerate(roots):
        groups.setdefault(r, []).append(x)
    classes = tuple(tuple(g) for g in sorted(groups.values(), key=lambda g: g[0]))
    class_of = [0] * space.n
    for k, cls in enumerate(classes):
        for x in cls:
            class_of[x] = k
    diameters = tuple(space.subset_diameter(c) for c in classes)
    return ChainPartition(epsilon, tuple(class_of), classes, diameters)


def chain_partition(space: MetricSpace, epsilon) -> ChainPartition:
    """Components of the graph with edges d(u, v) < epsilon, by union-find."""
    epsilon = _check_epsilon(epsilon)
    uf = _UnionFind(space.n)
    for u, v in np.argwhere(np.triu(space.dist < epsilon, k=1)).tolist():
        uf.union(u, v)
    return _partition(space, epsilon, [uf.find(x) for x in range(space.n)])


def chain_partition_bfs(space: MetricSpace, epsilon) -> ChainPartition:
    """Breadth-first component labelling; independent check of :func:`chain_partition`."""
    epsilon = _check_epsilon(epsilon)
    n = space.n
    adj = space.dist < epsilon
    label = [-1] * n
    for s in range(n):
        if label[s] >= 0:
            continue
        label[s] = s
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in np.flatnonzero(adj[u]).tolist():
                if label[v] < 0:
                    label[v] = s
                    queue.append(v)
    return _partition(space, epsilon, label)


def epsilon_candidates(space: MetricSpace) -> list[float]:
    """Distinct pairwise distances, preceded by one value below the smallest.

    Between consecutive candidates the partition does not change.
    """
    dd = space.distinct_distances
    if dd.size == 0:
        return []
    return [float(dd[0]) / 2, *map(float, dd)]


def resolve_epsilon(space: MetricSpace, eta) -> float:
    """Largest candidate epsilon whose chain classes all have diameter < eta."""
    eta = float(eta)
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta!r}")
    cands = epsilon_candidates(space)
    if not cands:
        return eta
    # max class diameter is nondecreasing in epsilon; cands[0] gives singletons
    lo, hi = 0, len(cands) - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if chain_partition(space, cands[mid]).max_diameter < eta:
            lo = mid
        else:
            hi = mid - 1
    return cands[lo]
