import json
import math

import numpy as np
import pytest
from hypothesis import given

from sepdyn import (
    DynSystem,
    MetricSpace,
    ValidationError,
    dump_system,
    gen_double_circle,
    load_system,
    orbit_decomposition,
    power_system,
)
from sepdyn.systems import TRIANGLE_RTOL

from conftest import system_from, systems


def test_load_single_point():
    s = load_system({"points": [{"id": 0, "x": 0.0, "y": 0.0}], "map": [0]})
    assert s.n == 1
    assert s.orbits.L == 1


def test_load_three_cycle_collinear():
    doc = {"points": [{"id": i, "x": float(i), "y": 0.0} for i in range(3)], "map": [1, 2, 0]}
    s = load_system(json.dumps(doc))
    assert s.orbits.period_of.tolist() == [3, 3, 3]
    assert s.dist[0, 2] == 2.0


def test_non_bijective_map():
    doc = {"points": [{"id": i, "x": float(i), "y": 0.0} for i in range(3)], "map": [0, 0, 2]}
    with pytest.raises(ValidationError, match="non-bijective: image 0 repeated") as e:
        load_system(doc)
    assert 0 in e.value.indices


@pytest.mark.parametrize(
    "doc, msg",
    [
        ({"map": [0]}, "exactly one of"),
        ({"points": [{"id": 0, "x": 0, "y": 0}]}, "'map' is required"),
        ({"points": [{"id": 1, "x": 0, "y": 0}], "map": [0]}, "ids must be 0..n-1"),
        ({"points": [{"id": 0, "x": 0, "y": 0}], "map": [1]}, "out of range"),
        ({"points": [{"id": 0, "x": 0, "y": 0}], "map": [0], "extra": 1}, "unknown field"),
        ({"distance_matrix": [[0, 1], [2, 0]], "map": [0, 1]}, r"d\(0,1\) != d\(1,0\)"),
        ({"distance_matrix": [[0, 0], [0, 0]], "map": [0, 1]}, "not positive"),
        ({"distance_matrix": [[0, 1, 5], [1, 0, 1], [5, 1, 0]], "map": [0, 1, 2]}, "triangle"),
        ({"points": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 0, "y": 0}], "map": [0, 1]}, "not positive"),
    ],
)
def test_schema_and_metric_errors(doc, msg):
    with pytest.raises(ValidationError, match=msg):
        load_system(doc)


def test_triangle_violation_reports_indices():
    with pytest.raises(ValidationError) as e:
        MetricSpace.from_matrix([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    assert sorted(e.value.indices) == [0, 1, 2]


def test_arrays_are_read_only():
    s = system_from([(0, 0), (1, 0)], [1, 0])
    with pytest.raises(ValueError):
        s.map[0] = 0
    with pytest.raises(ValueError):
        s.dist[0, 1] = 3.0


def test_orbits_identity():
    s = system_from([(i, 0) for i in range(5)], range(5))
    orb = orbit_decomposition(s)
    assert orb.cycles == tuple((i,) for i in range(5))
    assert orb.L == 1


def test_orbits_wine2(wine2):
    orb = wine2.orbits
    assert sorted(len(c) for c in orb.cycles) == [3, 10]
    assert orb.L == 30


def test_orbits_double_circle():
    orb = gen_double_circle(4, 0.5).orbits
    assert [len(c) for c in orb.cycles] == [4, 4]
    assert orb.L == 4


def test_cycles_sorted_by_smallest_member():
    s = system_from([(i, 0) for i in range(6)], [3, 5, 4, 0, 2, 1])
    assert s.orbits.cycles == ((0, 3), (1, 5), (2, 4))


def test_power_identity_and_period():
    s = system_from([(0, 0), (1, 0), (2, 0)], [1, 2, 0])
    assert power_system(s, 1) == s
    assert power_system(s, 3).map.tolist() == [0, 1, 2]
    assert power_system(s, -1).map.tolist() == [2, 0, 1]
    with pytest.raises(ValueError):
        power_system(s, 0)


def test_power_splits_level_six(wine6):
    level6 = [x for x in range(wine6.n) if wine6.labels[x]["n"] == 6]
    # oracle: compose the permutation with itself and walk its cycles on level 6
    sq = [int(wine6.map[int(wine6.map[x])]) for x in range(wine6.n)]
    seen, lengths = set(), []
    for x in level6:
        if x in seen:
            continue
        z, k = x, 0
        while z not in seen:
            seen.add(z)
            z, k = sq[z], k + 1
        lengths.append(k)
    assert lengths == [39, 39]
    powered = power_system(wine6, 2).orbits
    assert sorted(len(c) for c in powered.cycles if c[0] in level6) == [39, 39]
    assert power_system(wine6, 2).labels == wine6.labels


@given(systems())
def test_order_is_identity(s):
    orb = s.orbits
    x = np.arange(s.n)
    for _ in range(orb.L):
        x = s.map[x]
    assert x.tolist() == list(range(s.n))
    assert all(orb.L % int(p) == 0 for p in orb.period_of)
    assert np.array_equal(orb.period_of[s.map], orb.period_of)
    assert sorted(v for c in orb.cycles for v in c) == list(range(s.n))


@given(systems(max_n=8))
def test_power_composition(s):
    for k in (-3, -1, 1, 2, 5):
        for m in (-2, 1, 3):
            twice = power_system(power_system(s, k), m)
            assert np.array_equal(twice.map, power_system(s, k * m).map)


@given(systems())
def test_coordinate_metric_axioms(s):
    d = s.dist
    assert np.all(np.diagonal(d) == 0)
    assert np.array_equal(d, d.T)
    assert np.all(d[~np.eye(s.n, dtype=bool)] > 0)
    # collinear lattice points reach equality, which rounding can miss by an ulp
    for y in range(s.n):
        assert np.all(d <= (d[:, y, None] + d[None, y, :]) * (1 + TRIANGLE_RTOL))
    MetricSpace.from_matrix(d)


@given(systems())
def test_round_trip(s):
    back = load_system(json.loads(json.dumps(dump_system(s))))
    assert back == s


def test_round_trip_matrix_and_labels():
    s = gen_double_circle(5, 0.25)
    back = load_system(json.dumps(dump_system(s)))
    assert back == s
    assert back.labels[6] == {"ring": 1, "step": 1}


def test_iterate():
    s = system_from([(i, 0) for i in range(4)], [1, 2, 0, 3])
    assert s.iterate(0, 2) == 2
    assert s.iterate(0, -1) == 2
    assert s.iterate(3, 7) == 3
    assert math.lcm(*[len(c) for c in s.orbits.cycles]) == s.orbits.L
