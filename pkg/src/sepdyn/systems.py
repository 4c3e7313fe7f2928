"""Finite metric dynamical systems: a finite metric space plus a bijection.

Points are dense integer ids ``0..n-1``.  A system is immutable once built;
every array it exposes is read-only.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property, reduce
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

__all__ = [
    "ValidationError",
    "MetricSpace",
    "DynSystem",
    "OrbitDecomposition",
    "load_system",
    "dump_system",
    "read_system",
    "write_system",
    "orbit_decomposition",
    "power_system",
]


class ValidationError(ValueError):
    """A system document or array failed validation.

    ``indices`` holds the offending point ids (possibly empty).
    """

    def __init__(self, message: str, indices: Sequence[int] = ()):
        super().__init__(message)
        self.indices = tuple(int(i) for i in indices)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _check_metric_basics(d: np.ndarray) -> None:
    n = d.shape[0]
    if not np.all(np.isfinite(d)):
        x, y = np.argwhere(~np.isfinite(d))[0]
        raise ValidationError(f"metric: non-finite distance at ({x}, {y})", (x, y))
    diag = np.diagonal(d)
    if np.any(diag != 0):
        x = int(np.flatnonzero(diag != 0)[0])
        raise ValidationError(f"metric: d({x},{x}) = {diag[x]!r} is not zero", (x,))
    asym = d != d.T
    if asym.any():
        x, y = np.argwhere(asym)[0]
        raise ValidationError(f"metric: d({x},{y}) != d({y},{x})", (x, y))
    off = d + np.eye(n)
    if np.any(off <= 0):
        x, y = np.argwhere(off <= 0)[0]
        raise ValidationError(f"metric: d({x},{y}) = {d[x, y]!r} is not positive", (x, y))


# collinear points satisfy the triangle inequality with equality, which
# float rounding can miss by an ulp; far below any decision margin
TRIANGLE_RTOL = 1e-12


def _check_triangle(d: np.ndarray) -> None:
    # O(n^3): one n-by-n comparison per intermediate point
    for y in range(d.shape[0]):
        bad = d > (d[:, y, None] + d[None, y, :]) * (1 + TRIANGLE_RTOL)
        if bad.any():
            x, z = np.argwhere(bad)[0]
            raise ValidationError(
                f"metric: triangle inequality fails: d({x},{z}) > d({x},{y}) + d({y},{z})",
                (x, y, z),
            )


@dataclass(frozen=True, eq=False)
class MetricSpace:
    """A finite metric space given by its full distance matrix.

    Use :meth:`from_coordinates` for planar points (Euclidean distance) or
    :meth:`from_matrix` for an explicit matrix (validated, including the
    triangle inequality).
    """

    dist: np.ndarray
    coords: np.ndarray | None = None

    @classmethod
    def from_coordinates(cls, coords) -> "MetricSpace":
        c = np.asarray(coords, dtype=float)
        if c.ndim != 2 or c.shape[1] != 2:
            raise ValidationError(f"coordinates must have shape (n, 2), got {c.shape}")
        if c.shape[0] == 0:
            raise ValidationError("a system needs at least one point")
        if not np.all(np.isfinite(c)):
            raise ValidationError("non-finite coordinate", np.flatnonzero(~np.isfinite(c).all(axis=1)))
        delta = c[:, None, :] - c[None, :, :]
        d = np.hypot(delta[..., 0], delta[..., 1])
        _check_metric_basics(d)
        return cls(_frozen(d), _frozen(c))

    @classmethod
    def from_matrix(cls, matrix, validate: bool = True) -> "MetricSpace":
        d = np.asarray(matrix, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValidationError(f"distance matrix must be square, got shape {d.shape}")
        if d.shape[0] == 0:
            raise ValidationError("a system needs at least one point")
        _check_metric_basics(d)
        if validate:
            _check_triangle(d)
        return cls(_frozen(d))

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @cached_property
    def distinct_distances(self) -> np.ndarray:
        """Sorted distinct positive pairwise distances."""
        iu = np.triu_indices(self.n, k=1)
        return _frozen(np.unique(self.dist[iu]))

    @property
    def min_distance(self) -> float | None:
        dd = self.distinct_distances
        return float(dd[0]) if dd.size else None

    @property
    def diameter(self) -> float:
        return float(self.dist.max())

    def subset_diameter(self, ids) -> float:
        ids = np.asarray(ids, dtype=int)
        if ids.size < 2:
            return 0.0
        return float(self.dist[np.ix_(ids, ids)].max())


@dataclass(frozen=True, eq=False)
class DynSystem:
    """A metric space together with a bijection ``map`` (``map[x]`` is f(x))."""

    space: MetricSpace
    map: np.ndarray
    labels: tuple[Mapping[str, Any], ...] | None = field(default=None)

    def __post_init__(self):
        p = np.asarray(self.map)
        if p.ndim != 1:
            raise ValidationError("map must be a flat list of images")
        if p.size and not np.issubdtype(p.dtype, np.integer):
            if not np.all(np.mod(p, 1) == 0):
                raise ValidationError("map entries must be integers")
        p = p.astype(np.int64)
        n = self.space.n
        if p.size != n:
            raise ValidationError(f"map has {p.size} entries for {n} points")
        out = np.flatnonzero((p < 0) | (p >= n))
        if out.size:
            raise ValidationError(f"map: image {p[out[0]]} of point {out[0]} is out of range", out[:1])
        counts = np.bincount(p, minlength=n)
        if np.any(counts > 1):
            img = int(np.flatnonzero(counts > 1)[0])
            pre = np.flatnonzero(p == img)
            raise ValidationError(
                f"non-bijective: image {img} repeated (points {', '.join(map(str, pre))})", [img, *pre]
            )
        object.__setattr__(self, "map", _frozen(p))
        if self.labels is not None:
            if len(self.labels) != n:
                raise ValidationError(f"labels has {len(self.labels)} entries for {n} points")
            object.__setattr__(self, "labels", tuple(dict(lab) for lab in self.labels))

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def dist(self) -> np.ndarray:
        return self.space.dist

    @cached_property
    def inverse(self) -> np.ndarray:
        inv = np.empty_like(self.map)
        inv[self.map] = np.arange(self.n)
        return _frozen(inv)

    @cached_property
    def orbits(self) -> "OrbitDecomposition":
        return orbit_decomposition(self)

    def iterate(self, x: int, k: int) -> int:
        """f^k(x) for any integer k."""
        orb = self.orbits
        c = orb.cycles[orb.cycle_of[x]]
        return c[(orb.position[x] + k) % len(c)]

    def __eq__(self, other):
        if not isinstance(other, DynSystem):
            return NotImplemented
        return (
            np.array_equal(self.map, other.map)
            and np.array_equal(self.dist, other.dist)
            and self.labels == other.labels
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class OrbitDecomposition:
    cycles: tuple[tuple[int, ...], ...]
    period_of: np.ndarray
    cycle_of: np.ndarray
    position: np.ndarray
    L: int

    @property
    def count(self) -> int:
        return len(self.cycles)

    def same_orbit(self, x: int, y: int) -> bool:
        return self.cycle_of[x] == self.cycle_of[y]


def orbit_decomposition(sys: DynSystem) -> OrbitDecomposition:
    """Cycles of the map, each starting at (and sorted by) its smallest id."""
    n = sys.n
    p = sys.map
    seen = np.zeros(n, dtype=bool)
    cycle_of = np.empty(n, dtype=np.int64)
    position = np.empty(n, dtype=np.int64)
    period = np.empty(n, dtype=np.int64)
    cycles = []
    for start in range(n):
        if seen[start]:
            continue
        cyc = []
        x = start
        while not seen[x]:
            seen[x] = True
            cycle_of[x] = len(cycles)
            position[x] = len(cyc)
            cyc.append(x)
            x = int(p[x])
        period[cyc] = len(cyc)
        cycles.append(tuple(cyc))
    L = reduce(math.lcm, (len(c) for c in cycles), 1)
    return OrbitDecomposition(tuple(cycles), _frozen(period), _frozen(cycle_of), _frozen(position), L)


def power_system(sys: DynSystem, k: int) -> DynSystem:
    """The system with map f^k; negative k uses the inverse."""
    k = int(k)
    if k == 0:
        raise ValueError("power k must be nonzero")
    orb = sys.orbits
    img = np.empty(sys.n, dtype=np.int64)
    for cyc in orb.cycles:
        c = np.asarray(cyc)
        img[c] = np.roll(c, -(k % len(c)))
    return DynSystem(sys.space, img, sys.labels)


# -- serialization ---------------------------------------------------------


def dump_system(sys: DynSystem) -> dict:
    doc: dict[str, Any] = {}
    if sys.space.coords is not None:
        doc["points"] = [
            {"id": i, "x": float(x), "y": float(y)} for i, (x, y) in enumerate(sys.space.coords)
        ]
    else:
        doc["distance_matrix"] = sys.dist.tolist()
    doc["map"] = [int(v) for v in sys.map]
    if sys.labels is not None:
        doc["labels"] = [dict(lab) for lab in sys.labels]
    return doc


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def load_system(document) -> DynSystem:
    """Build a validated system from a JSON document (dict or JSON text)."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise ValidationError(f"schema: not valid JSON ({e})") from e
    if not isinstance(document, Mapping):
        raise ValidationError("schema: system document must be a JSON object")
    allowed = {"points", "distance_matrix", "map", "labels"}
    extra = sorted(set(document) - allowed)
    if extra:
        raise ValidationError(f"schema: unknown field(s) {extra}")
    has_pts, has_mat = "points" in document, "distance_matrix" in document
    if has_pts == has_mat:
        raise ValidationError("schema: exactly one of 'points' or 'distance_matrix' is required")
    if "map" not in document:
        raise ValidationError("schema: 'map' is required")

    if has_pts:
        pts = document["points"]
        if not isinstance(pts, list):
            raise ValidationError("schema: 'points' must be a list")
        coords = []
        for k, pt in enumerate(pts):
            if not isinstance(pt, Mapping) or set(pt) != {"id", "x", "y"}:
                raise ValidationError(f"schema: point {k} must have exactly the fields id, x, y", (k,))
            if pt["id"] != k or isinstance(pt["id"], bool):
                raise ValidationError(f"schema: point at position {k} has id {pt['id']!r}; ids must be 0..n-1 in order", (k,))
            if not (_is_number(pt["x"]) and _is_number(pt["y"])):
                raise ValidationError(f"schema: point {k} coordinates must be numbers", (k,))
            coords.append((pt["x"], pt["y"]))
        space = MetricSpace.from_coordinates(np.array(coords, dtype=float).reshape(-1, 2))
    else:
        mat = document["distance_matrix"]
        if not isinstance(mat, list) or not all(isinstance(r, list) for r in mat):
            raise ValidationError("schema: 'distance_matrix' must be a list of rows")
        for r, row in enumerate(mat):
            if len(row) != len(mat):
                raise ValidationError(f"schema: distance_matrix row {r} has {len(row)} entries, expected {len(mat)}", (r,))
            if not all(_is_number(v) for v in row):
                raise ValidationError(f"schema: distance_matrix row {r} has a non-number", (r,))
        space = MetricSpace.from_matrix(mat)

    mp = document["map"]
    if not isinstance(mp, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in mp):
        raise ValidationError("schema: 'map' must be a list of integer ids")
    labels = document.get("labels")
    if labels is not None and (
        not isinstance(labels, list) or not all(isinstance(lab, Mapping) for lab in labels)
    ):
        raise ValidationError("schema: 'labels' must be a list of objects")
    return DynSystem(space, np.array(mp, dtype=np.int64), None if labels is None else tuple(labels))


def read_system(path) -> DynSystem:
    return load_system(Path(path).read_text())


def write_system(sys: DynSystem, path) -> None:
    Path(path).write_text(json.dumps(dump_system(sys)) + "\n")
