"""Exit criteria. Each test records one PASS/FAIL line (see the summary
section at the end of the pytest run)."""

import json
import time
from fractions import Fraction

import numpy as np
import pytest

from sepdyn import (
    WineParams,
    chain_partition,
    chain_partition_bfs,
    classify,
    cyclic_group_expansivity,
    dump_system,
    gamma_oracle,
    gamma_profile,
    gen_circle,
    gen_double_circle,
    gen_identity_space,
    gen_power_witness,
    gen_random,
    gen_wine,
    load_system,
    power_system,
    recurrence_profile,
    resolve_epsilon,
)
from sepdyn.chains import epsilon_candidates
from sepdyn.classify import classify_profile
from sepdyn.cli import _quantile_etas, main
from sepdyn.gamma import pair_orbit_distances

from conftest import record

SEED = 20261014
N_RANDOM = 100
MAX_POINTS = 48


@pytest.fixture(scope="module")
def random_systems():
    rng = np.random.default_rng(SEED)
    out = []
    for _ in range(N_RANDOM):
        s = gen_random(rng, int(rng.integers(1, MAX_POINTS + 1)))
        out.append((s, _quantile_etas(s, 5)))
    return out


@pytest.fixture(scope="module")
def wine6():
    return gen_wine(WineParams(6))


def test_c1_oracle_equivalence(random_systems):
    t0 = time.perf_counter()
    mismatches = 0
    for s, etas in random_systems:
        assert len(etas) == 5
        for eta in etas:
            mismatches += gamma_profile(s, eta) != gamma_oracle(s, eta)
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 30
    record("C1 oracle equivalence", ok, f"systems={len(random_systems)} mismatches={mismatches} time={elapsed:.2f}s (<30s)")
    assert mismatches == 0
    assert elapsed < 30


def test_c2_example_reproduction():
    t0 = time.perf_counter()
    s = gen_wine(WineParams(6))
    prof = gamma_profile(s, 0.05)
    same = prof == gamma_oracle(s, 0.05)
    rep = classify_profile(s, prof, 0.0)
    cyc = s.orbits.cycle_of
    inside = all(
        s.orbits.period_of[x] >= 1 and all(cyc[y] == cyc[x] for y in prof.members[x])
        for x in range(s.n)
        if len(prof.members[x]) > 1
    )
    elapsed = time.perf_counter() - t0
    ok = rep.separating_at and rep.min_N == 6 and inside and same and elapsed < 5
    record("C2 example reproduction", ok, f"separating={rep.separating_at} min_N={rep.min_N} oracle_match={same} time={elapsed:.2f}s (<5s)")
    assert rep.separating_at and rep.min_N == 6
    assert inside and same
    assert elapsed < 5


def test_c3_family_law():
    t0 = time.perf_counter()
    cards = []
    for M in range(2, 11):
        s = gen_wine(WineParams(M))
        cards.append(gamma_profile(s, 0.05).max_card)
    elapsed = time.perf_counter() - t0
    increasing = all(a < b for a, b in zip(cards, cards[1:]))
    ok = cards == list(range(2, 11)) and increasing and elapsed < 60
    record("C3 family law", ok, f"max_card={cards} time={elapsed:.2f}s (<60s)")
    assert cards == list(range(2, 11))
    assert increasing
    assert elapsed < 60


def _witness_ok(k, m):
    w = gen_power_witness(k, m)
    n = k * m
    x, y = w.x_id, w.y_id
    # independent re-walks on the raw permutation
    z, period = int(w.system.map[x]), 1
    while z != x:
        z, period = int(w.system.map[z]), period + 1
    z = x
    for _ in range(2 * n + 1):
        z = int(w.system.map[z])
    powered = power_system(w.system, k)
    ok = (
        period == w.claimed_period == n * (2 * n + 1)
        and z == y
        and not powered.orbits.same_orbit(x, y)
        and w.sup_orbit_distance == max(pair_orbit_distances(w.system, x, y))
        and w.sup_orbit_distance_exact == Fraction(n - 1, 4 * n**3)
        and not classify(powered, w.sup_orbit_distance, 0.0).separating_at
    )
    return ok, w


def test_c4_power_witness():
    t0 = time.perf_counter()
    ok23, w = _witness_ok(2, 3)
    elapsed = time.perf_counter() - t0
    main_ok = (
        ok23
        and w.claimed_period == 78
        and w.system.iterate(w.x_id, 13) == w.y_id
        and w.sup_orbit_distance_exact == Fraction(5, 864)
        and elapsed < 1
    )
    grid = {(k, m): _witness_ok(k, m)[0] for k in (2, 3, 4) for m in (1, 2, 3)}
    ok = main_ok and all(grid.values())
    record("C4 power witness", ok, f"(2,3) sup={w.sup_orbit_distance_exact} time={elapsed:.3f}s (<1s) grid_ok={sum(grid.values())}/9")
    assert main_ok
    assert all(grid.values()), grid


def test_c5_chains(random_systems, wine6):
    mismatches = 0
    for s, etas in random_systems:
        for eps in etas:
            if eps > 0:
                mismatches += chain_partition(s.space, eps) != chain_partition_bfs(s.space, eps)
    resolved_ok = []
    cases = [(wine6, [0.05])] + [(s, _quantile_etas(s, 3)) for s, _ in random_systems if s.n > 1][:20]
    for s, etas in cases:
        cands = epsilon_candidates(s.space)
        for eta in etas:
            eps = resolve_epsilon(s.space, eta)
            nxt = cands.index(eps) + 1
            good = chain_partition(s.space, eps).max_diameter < eta
            sharp = nxt == len(cands) or chain_partition(s.space, cands[nxt]).max_diameter >= eta
            resolved_ok.append(good and sharp)
    ok = mismatches == 0 and all(resolved_ok) and len(cases) == 21
    record("C5 chains", ok, f"uf/bfs mismatches={mismatches} resolve checks={sum(resolved_ok)}/{len(resolved_ok)} systems={len(cases)}")
    assert mismatches == 0
    assert all(resolved_ok) and len(cases) == 21


def _hierarchy_violations(s, etas):
    bad = 0
    d = s.dist
    p = s.map
    grid = sorted(set(etas) | {0.0, float(d.max())})
    prev = None
    for eta in grid:
        g = gamma_profile(s, eta)
        rep = classify_profile(s, g, 0.0)
        m = g.matrix
        bad += not np.all(np.diagonal(m))
        bad += not np.array_equal(m, m.T)
        bad += not np.array_equal(m, m[np.ix_(p, p)])
        if rep.expansive_at:
            bad += not rep.separating_at
        if rep.separating_at:
            bad += not np.all(g.cards <= s.orbits.period_of)
        if prev is not None:
            bad += bool(np.any(prev & ~m))
        prev = m
    return bad


def test_c6_hierarchy_suite(random_systems):
    # every system and eta from criteria 1-4
    seen = list(random_systems)
    seen += [(gen_wine(WineParams(M)), [0.05]) for M in range(2, 11)]
    for k in (2, 3, 4):
        for m in (1, 2, 3):
            w = gen_power_witness(k, m)
            seen += [(w.system, [w.sup_orbit_distance]), (power_system(w.system, k), [w.sup_orbit_distance])]
    violations = sum(_hierarchy_violations(s, etas) for s, etas in seen)
    ok = violations == 0
    record("C6 hierarchy invariants", ok, f"systems={len(seen)} violations={violations}")
    assert violations == 0


def test_c7_recurrence_and_groups(random_systems):
    t0 = time.perf_counter()
    finite = [gen_circle(8), gen_double_circle(8, 0.05), gen_identity_space(5), gen_wine(WineParams(3))]
    finite += [s for s, _ in random_systems if s.orbits.L <= 10**6][:30]
    witness_ok = all(recurrence_profile(s).displacement[-1] == 0 for s in finite)
    circle = gen_circle(8, 1.0)
    group = cyclic_group_expansivity(circle)
    minimal_n = recurrence_profile(circle, [0.1]).minimal_n[0.1]
    dc = gen_double_circle(8, 0.05)
    rep = classify(dc, 0.1)
    x, y = rep.separating_witness or (0, 0)
    witness_valid = (
        rep.separating_witness is not None
        and max(pair_orbit_distances(dc, x, y)) <= 0.1
        and not dc.orbits.same_orbit(x, y)
    )
    elapsed = time.perf_counter() - t0
    ok = witness_ok and group.overall and minimal_n == 8 and not rep.separating_at and witness_valid and elapsed < 5
    record(
        "C7 recurrence and groups",
        ok,
        f"|f^L|=0 on {len(finite)} systems={witness_ok} group={group.overall} minimal_n(0.1)={minimal_n} "
        f"double-circle witness={rep.separating_witness} time={elapsed:.2f}s (<5s)",
    )
    assert witness_ok and group.overall and minimal_n == 8
    assert not rep.separating_at and witness_valid
    assert elapsed < 5


def _cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    assert code == 0
    return out


def test_c8_determinism_and_round_trip(capsys, tmp_path):
    for s in (
        gen_wine(WineParams(4)),
        gen_wine(WineParams(2, include_fixed_point=True)),
        gen_double_circle(6, 0.05),
        gen_circle(5),
        gen_identity_space(6),
        gen_random(np.random.default_rng(SEED), 20),
    ):
        assert load_system(json.dumps(dump_system(s))) == s
    path = tmp_path / "w.json"
    _cli(capsys, "generate", "--family", "wine", "--levels", "5", "--out", str(path))
    round_trip = load_system(path.read_text()) == gen_wine(WineParams(5))
    runs = [
        ("analyze", "--system", str(path), "--eta", "0.05"),
        ("oracle-check", "--samples", "10", "--seed", str(SEED)),
        ("family", "--family", "double-circle", "--range", "4..8", "--eta", "0.1", "--no-timing"),
        ("generate", "--family", "random", "--points", "30", "--seed", "9"),
        ("witness-powers", "--k", "3", "--m", "2"),
    ]
    identical = all(_cli(capsys, *argv) == _cli(capsys, *argv) for argv in runs)
    ok = round_trip and identical
    record("C8 determinism and round-trip", ok, f"round_trip={round_trip} byte_identical={identical}")
    assert round_trip and identical
