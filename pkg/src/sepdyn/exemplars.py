"""Generators: the column-shift family of finite levels that is separating but
has unbounded Gamma cardinality, its power witnesses, and auxiliary
families (circles, identity on Cantor endpoints, random systems)."""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .systems import DynSystem, MetricSpace, power_system

__all__ = [
    "DEFAULT_SPACING",
    "InvariantViolation",
    "SpacingRule",
    "WineParams",
    "WitnessCase",
    "gen_wine",
    "wine_points",
    "gen_power_witness",
    "gen_circle",
    "gen_double_circle",
    "gen_identity_space",
    "gen_random",
]

DEFAULT_SPACING = "1/n+i/(4n^3)"


class InvariantViolation(RuntimeError):
    """A construction failed one of its own post-conditions."""


_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}


def _implicit_mult(text: str) -> str:
    # "4n^3" -> "4*n**3", "2(n+1)" -> "2*(n+1)"
    out = []
    for k, ch in enumerate(text):
        if k and (ch in "ni(") and (text[k - 1].isdigit() or text[k - 1] in "ni)"):
            out.append("*")
        out.append(ch)
    return "".join(out).replace("^", "**")


class SpacingRule:
    """Height a(n, i) of point i in level n, from an arithmetic expression in
    ``n`` and ``i`` (``^`` is power, juxtaposition is multiplication).

    Evaluated with exact rationals.
    """

    def __init__(self, expr: str = DEFAULT_SPACING):
        self.expr = expr
        try:
            self._tree = ast.parse(_implicit_mult(expr.replace(" ", "")), mode="eval").body
        except SyntaxError as e:
            raise ValueError(f"cannot parse spacing rule {expr!r}") from e
        self(1, 0)

    def _eval(self, node, env):
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return Fraction(node.value)
        if isinstance(node, ast.Name) and node.id in env:
            return Fraction(env[node.id])
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            left, right = self._eval(node.left, env), self._eval(node.right, env)
            if isinstance(node.op, ast.Pow):
                if right.denominator != 1:
                    raise ValueError("spacing rule exponents must be integers")
                right = int(right)
            return _BINOPS[type(node.op)](left, right)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = self._eval(node.operand, env)
            return -v if isinstance(node.op, ast.USub) else v
        raise ValueError(f"unsupported element in spacing rule {self.expr!r}")

    def __call__(self, n: int, i: int) -> Fraction:
        return self._eval(self._tree, {"n": n, "i": i})

    def __repr__(self):
        return f"SpacingRule({self.expr!r})"


@dataclass(frozen=True)
class WineParams:
    M: int
    spacing: str = DEFAULT_SPACING
    include_fixed_point: bool = False


def _check_spacing(rule: SpacingRule, M: int) -> dict[int, list[Fraction]]:
    heights = {n: [rule(n, i) for i in range(n)] for n in range(1, M + 1)}
    for n, hs in heights.items():
        if min(hs) <= 0:
            raise ValueError(f"spacing {rule.expr!r}: level {n} has a non-positive height")
        if len(set(hs)) != n:
            raise ValueError(f"spacing {rule.expr!r}: level {n} has repeated heights")
        if n > 1 and max(hs) >= min(heights[n - 1]):
            raise ValueError(
                f"spacing {rule.expr!r}: levels {n - 1} and {n} are not separated (need max(A_{n}) < min(A_{n - 1}))"
            )
    return heights


def wine_points(params: WineParams) -> list[tuple[int, int, int, Fraction]]:
    """(n, j, i, height) for every finite point, ordered by n, then i, then j."""
    if params.M < 1:
        raise ValueError("M must be a positive integer")
    heights = _check_spacing(SpacingRule(params.spacing), params.M)
    return [
        (n, j, i, heights[n][i])
        for n in range(1, params.M + 1)
        for i in range(n)
        for j in range(-n, n + 1)
    ]


def _chordal(coords: np.ndarray) -> np.ndarray:
    # chordal metric of the Riemann sphere; the last row/column is infinity
    sq = 1.0 + (coords**2).sum(axis=1)
    delta = coords[:, None, :] - coords[None, :, :]
    planar = np.hypot(delta[..., 0], delta[..., 1])
    root = np.sqrt(sq)
    n = len(coords)
    d = np.zeros((n + 1, n + 1))
    d[:n, :n] = 2 * planar / (root[:, None] * root[None, :])
    d[:n, n] = d[n, :n] = 2 / root
    return d


def gen_wine(params: WineParams) -> DynSystem:
    """Levels n = 1..M; level n is the grid of columns -n..n times heights A_n.

    f moves a point one column right, and from column n back to column -n
    one height up (index i -> i + 1 mod n), so each level is one cycle of
    length n(2n + 1).  With ``include_fixed_point`` the point at infinity is
    appended as a fixed point and all distances become chordal.
    """
    pts = wine_points(params)
    index = {(n, j, i): k for k, (n, j, i, _) in enumerate(pts)}
    img = []
    for n, j, i, _ in pts:
        img.append(index[(n, j + 1, i)] if j < n else index[(n, -n, (i + 1) % n)])
    labels = [{"n": n, "j": j, "i": i} for n, j, i, _ in pts]
    coords = np.array([(float(j), float(h)) for _, j, _, h in pts])
    if params.include_fixed_point:
        space = MetricSpace.from_matrix(_chordal(coords))
        img.append(len(pts))
        labels.append({"point": "infinity"})
    else:
        space = MetricSpace.from_coordinates(coords)
    return DynSystem(space, np.array(img), tuple(labels))


@dataclass(frozen=True, eq=False)
class WitnessCase:
    k: int
    m: int
    system: DynSystem
    x_id: int
    y_id: int
    claimed_period: int
    claimed_shift: int
    sup_orbit_distance: float
    sup_orbit_distance_exact: Fraction | None
    checks: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "m": self.m,
            "levels": max(lab.get("n", 0) for lab in self.system.labels),
            "n_points": self.system.n,
            "x_id": self.x_id,
            "y_id": self.y_id,
            "x_label": self.system.labels[self.x_id],
            "y_label": self.system.labels[self.y_id],
            "claimed_period": self.claimed_period,
            "claimed_shift": self.claimed_shift,
            "sup_orbit_distance": self.sup_orbit_distance,
            "sup_orbit_distance_exact": None
            if self.sup_orbit_distance_exact is None
            else str(self.sup_orbit_distance_exact),
            "checks": self.checks,
        }


def _exact_sqrt(q: Fraction) -> Fraction | None:
    a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
    return Fraction(a, b) if a * a == q.numerator and b * b == q.denominator else None


def gen_power_witness(k: int, m: int, params: WineParams | None = None) -> WitnessCase:
    """Points x = (0, a_{km,1}), y = (0, a_{km,2}) showing f^k is not separating.

    They share the f-cycle of level km (period km(2km+1), y = f^{2km+1} x)
    but lie in different cycles of f^k because k does not divide 2km + 1.
    Every claim is re-checked by direct iteration before returning.
    """
    if k < 2 or m < 1:
        raise ValueError("need k >= 2 and m >= 1")
    level = k * m
    if params is None:
        params = WineParams(M=level)
    if params.M < level:
        raise ValueError(f"levels M = {params.M} < km = {level}")
    sys = gen_wine(params)
    pts = wine_points(params)
    index = {(n, j, i): t for t, (n, j, i, _) in enumerate(pts)}
    x, y = index[(level, 0, 1 % level)], index[(level, 0, 2 % level)]
    period = level * (2 * level + 1)
    shift = 2 * level + 1

    walked, z = 1, int(sys.map[x])
    while z != x:
        z, walked = int(sys.map[z]), walked + 1
    z = x
    for _ in range(shift):
        z = int(sys.map[z])
    powered = power_system(sys, k).orbits

    exact = [(Fraction(j), h) for _, j, _, h in pts]
    sup_sq = Fraction(0)
    sup = 0.0
    a, b = x, y
    for _ in range(period):
        (xa, ya), (xb, yb) = exact[a], exact[b]
        sup_sq = max(sup_sq, (xa - xb) ** 2 + (ya - yb) ** 2)
        sup = max(sup, float(sys.dist[a, b]))
        a, b = int(sys.map[a]), int(sys.map[b])

    checks = {
        "period": {"computed": walked, "claimed": period, "ok": walked == period},
        "shift": {"image": z, "y_id": y, "ok": z == y},
        "distinct_power_cycles": {
            "k_divides_shift": shift % k == 0,
            "ok": not powered.same_orbit(x, y),
            "power_cycle_lengths": [int(powered.period_of[x]), int(powered.period_of[y])],
        },
    }
    failed = [name for name, c in checks.items() if not c["ok"]]
    if failed:
        raise InvariantViolation(f"power witness (k={k}, m={m}) failed: {', '.join(failed)}")
    return WitnessCase(k, m, sys, x, y, period, shift, sup, _exact_sqrt(sup_sq), checks)


def _ring_matrix(radii: list[float], N: int, gap: float | None = None) -> np.ndarray:
    # distances depend only on ring radii and the step difference, so the
    # matrix is exactly invariant under rotation; ``gap`` overrides the
    # radial separation of two rings
    R = len(radii)
    s = [math.sin(math.pi * min(t, N - t) / N) for t in range(N)]
    d = np.zeros((R * N, R * N))
    for a, ra in enumerate(radii):
        for b, rb in enumerate(radii):
            for t in range(N):
                if a == b:
                    v = 2 * ra * s[t]
                else:
                    v = math.hypot(abs(ra - rb) if gap is None else gap, 2 * math.sqrt(ra * rb) * s[t])
                for u in range(N):
                    d[a * N + u, b * N + (u + t) % N] = v
    return d


def _rotation(R: int, N: int) -> list[int]:
    return [r * N + (u + 1) % N for r in range(R) for u in range(N)]


def gen_circle(N: int, radius: float = 1.0) -> DynSystem:
    """N equally spaced points on a circle, rotated by one step."""
    if N < 1 or not radius > 0:
        raise ValueError("need N >= 1 and radius > 0")
    space = MetricSpace.from_matrix(_ring_matrix([float(radius)], N))
    return DynSystem(space, np.array(_rotation(1, N)), tuple({"ring": 0, "step": u} for u in range(N)))


def gen_double_circle(N: int, rho: float) -> DynSystem:
    """Concentric circles of radii 1 and 1 + rho, N points each at shared
    angles, both rotated by one step: two N-cycles whose same-angle pairs stay
    at distance exactly rho."""
    if N < 2 or not rho > 0:
        raise ValueError("need N >= 2 and rho > 0")
    radii = [1.0, 1.0 + float(rho)]
    # radial gap exactly rho, not the rounded (1 + rho) - 1
    space = MetricSpace.from_matrix(_ring_matrix(radii, N, gap=float(rho)))
    labels = tuple({"ring": r, "step": u} for r in range(2) for u in range(N))
    return DynSystem(space, np.array(_rotation(2, N)), labels)


def _cantor_left_endpoints(n: int) -> list[Fraction]:
    pts = [Fraction(0)]
    intervals = [(Fraction(0), Fraction(1))]
    while len(pts) < n:
        nxt = []
        for lo, hi in intervals:
            w = (hi - lo) / 3
            nxt += [(lo, lo + w), (hi - w, hi)]
            if len(pts) < n:
                pts.append(hi - w)
        intervals = nxt
    return pts[:n]


def gen_identity_space(n: int) -> DynSystem:
    """Identity on the first n left endpoints of the middle-thirds construction."""
    if n < 1:
        raise ValueError("need n >= 1")
    xs = _cantor_left_endpoints(n)
    coords = np.array([(float(x), 0.0) for x in xs])
    return DynSystem(MetricSpace.from_coordinates(coords), np.arange(n), tuple({"x": str(x)} for x in xs))


def gen_random(rng: np.random.Generator, n: int) -> DynSystem:
    """n points uniform in the unit square with a uniformly random permutation."""
    if n < 1:
        raise ValueError("need n >= 1")
    space = MetricSpace.from_coordinates(rng.random((n, 2)))
    return DynSystem(space, rng.permutation(n))
