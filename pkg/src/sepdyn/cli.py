"""Command line: ``sepdyn {generate,analyze,family,witness-powers,oracle-check}``.

Exit codes: 0 success, 2 invalid input, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

import numpy as np

from .chains import chain_partition, chain_partition_bfs, resolve_epsilon
from .classify import classify_profile, critical_constants, theorem_checks
from .exemplars import (
    DEFAULT_SPACING,
    InvariantViolation,
    WineParams,
    gen_circle,
    gen_double_circle,
    gen_identity_space,
    gen_power_witness,
    gen_random,
    gen_wine,
)
from .gamma import GammaProfile, gamma_oracle, gamma_profile
from .recurrence import CapExceeded, minimality, recurrence_profile
from .systems import DynSystem, ValidationError, dump_system, power_system, read_system

EXIT_OK, EXIT_INPUT, EXIT_INVARIANT = 0, 2, 3


def _parse_range(text: str) -> range:
    try:
        a, b = text.split("..")
        lo, hi = int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"range must look like A..B, got {text!r}")
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return range(lo, hi + 1)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def check_profile_invariants(sys_: DynSystem, prof: GammaProfile) -> None:
    """Reflexive, symmetric and equivariant; raises InvariantViolation."""
    g = prof.matrix
    if not np.all(np.diagonal(g)):
        raise InvariantViolation("gamma profile is not reflexive")
    if not np.array_equal(g, g.T):
        raise InvariantViolation("gamma profile is not symmetric")
    p = sys_.map
    if not np.array_equal(g, g[np.ix_(p, p)]):
        raise InvariantViolation("gamma profile is not equivariant under the map")


def _generate_system(args) -> DynSystem:
    fam = args.family
    if fam == "wine":
        return gen_wine(WineParams(args.levels, args.spacing, args.include_infinity))
    if fam == "double-circle":
        return gen_double_circle(args.points, args.rho)
    if fam == "circle":
        return gen_circle(args.points, args.radius)
    if fam == "identity":
        return gen_identity_space(args.points)
    if fam == "random":
        return gen_random(np.random.default_rng(args.seed), args.points)
    raise ValueError(f"unknown family {fam!r}")


def cmd_generate(args) -> int:
    _emit(json.dumps(dump_system(_generate_system(args))) + "\n", args.out)
    return EXIT_OK


def analyze_system(sys_: DynSystem, eta: float, epsilon: float | None, rec_eps) -> dict:
    """Classification, chains, recurrence and theorem checks for one system."""
    prof = gamma_profile(sys_, eta)
    check_profile_invariants(sys_, prof)
    if epsilon is None:
        epsilon = resolve_epsilon(sys_.space, eta) if eta > 0 else sys_.space.min_distance or 1.0
    report = classify_profile(sys_, prof, epsilon)
    chains = chain_partition(sys_.space, epsilon) if epsilon > 0 else None
    minimal, count = minimality(sys_)
    orb = sys_.orbits
    out = {
        "system": {
            "n_points": sys_.n,
            "orbit_count": count,
            "cycle_lengths": [len(c) for c in orb.cycles],
            "L": orb.L,
            "minimal": minimal,
        },
        "classification": report.to_dict(),
        "gamma": prof.to_dict(),
        "critical_constants": critical_constants(sys_).to_dict(),
        "chains": None if chains is None else chains.to_dict(),
        "theorem": theorem_checks(sys_, eta).to_dict(),
    }
    try:
        rec = recurrence_profile(sys_, rec_eps if rec_eps else ([eta] if eta > 0 else []))
    except CapExceeded as e:
        out["recurrence"] = {"skipped": str(e)}
    else:
        if rec.displacement[-1] != 0:
            raise InvariantViolation("|f^L| != 0")
        out["recurrence"] = rec.to_dict()
    return out


def cmd_analyze(args) -> int:
    sys_ = read_system(args.system)
    _emit(_json(analyze_system(sys_, args.eta, args.epsilon, args.recurrence_eps)), args.out)
    return EXIT_OK


FAMILY_COLUMNS = ["parameter", "n_points", "max_card", "separating_at", "min_N", "runtime_ms"]


def family_rows(name: str, params, eta: float, rho: float = 0.05, spacing: str = DEFAULT_SPACING, timing: bool = True):
    rows = []
    for value in params:
        t0 = time.perf_counter()
        if name == "wine":
            s = gen_wine(WineParams(value, spacing))
        elif name == "double-circle":
            s = gen_double_circle(value, rho)
        else:
            raise ValueError(f"unknown family {name!r} (expected wine or double-circle)")
        prof = gamma_profile(s, eta)
        rep = classify_profile(s, prof, 0.0)
        ms = (time.perf_counter() - t0) * 1000 if timing else 0.0
        rows.append([value, s.n, prof.max_card, str(rep.separating_at).lower(), rep.min_N, f"{ms:.3f}"])
    return rows


def cmd_family(args) -> int:
    rows = family_rows(args.family, args.range, args.eta, args.rho, args.spacing, not args.no_timing)
    if args.format == "json":
        text = _json([dict(zip(FAMILY_COLUMNS, r)) for r in rows])
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(FAMILY_COLUMNS)
        w.writerows(rows)
        text = buf.getvalue()
    _emit(text, args.out)
    return EXIT_OK


def cmd_witness(args) -> int:
    levels = args.levels if args.levels is not None else args.k * args.m
    case = gen_power_witness(args.k, args.m, WineParams(levels, args.spacing))
    doc = case.to_dict()
    powered = power_system(case.system, args.k)
    rep = classify_profile(powered, gamma_profile(powered, case.sup_orbit_distance), 0.0)
    doc["power_map_at_sup_distance"] = {
        "eta": case.sup_orbit_distance,
        "separating_at": rep.separating_at,
        "witness_in_gamma": bool(gamma_profile(powered, case.sup_orbit_distance).matrix[case.x_id, case.y_id]),
    }
    _emit(_json(doc), args.out)
    return EXIT_OK


def _quantile_etas(s: DynSystem, count: int = 5) -> list[float]:
    dd = s.space.distinct_distances
    if dd.size == 0:
        return [0.0] * count
    qs = np.linspace(0.1, 0.9, count)
    return [float(v) for v in np.quantile(dd, qs, method="lower")]


def oracle_check(samples: int, seed: int, max_points: int = 48, dump_dir: str | None = None) -> dict:
    """Differential check on random systems; returns a summary, mismatches listed."""
    rng = np.random.default_rng(seed)
    mismatches = []
    checked = 0
    for k in range(samples):
        n = int(rng.integers(1, max_points + 1))
        s = gen_random(rng, n)
        for eta in _quantile_etas(s):
            checked += 1
            if gamma_profile(s, eta) != gamma_oracle(s, eta):
                mismatches.append({"sample": k, "check": "gamma", "eta": eta})
            if eta > 0 and chain_partition(s.space, eta) != chain_partition_bfs(s.space, eta):
                mismatches.append({"sample": k, "check": "chains", "epsilon": eta})
        if mismatches and mismatches[-1]["sample"] == k and dump_dir:
            Path(dump_dir).mkdir(parents=True, exist_ok=True)
            (Path(dump_dir) / f"failing_{k}.json").write_text(json.dumps(dump_system(s)) + "\n")
    return {"samples": samples, "seed": seed, "max_points": max_points, "checks": checked, "mismatches": mismatches}


def cmd_oracle(args) -> int:
    summary = oracle_check(args.samples, args.seed, args.max_points, args.dump_dir)
    _emit(_json(summary), args.out)
    return EXIT_INVARIANT if summary["mismatches"] else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sepdyn", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output path (default: stdout)")
        return p

    g = common(sub.add_parser("generate", help="write a system JSON"))
    g.add_argument("--family", required=True, choices=["wine", "double-circle", "circle", "identity", "random"])
    g.add_argument("--levels", type=int, default=6, help="wine: max level M")
    g.add_argument("--spacing", default=DEFAULT_SPACING)
    g.add_argument("--include-infinity", action="store_true", help="wine: add the fixed point at infinity")
    g.add_argument("--points", type=int, default=8, help="points per circle / identity or random size")
    g.add_argument("--rho", type=float, default=0.05)
    g.add_argument("--radius", type=float, default=1.0)
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(func=cmd_generate)

    a = common(sub.add_parser("analyze", help="classify a system at a resolution"))
    a.add_argument("--system", required=True)
    a.add_argument("--eta", type=float, required=True)
    a.add_argument("--epsilon", type=float, default=None)
    a.add_argument("--recurrence-eps", type=float, nargs="*", default=None)
    a.add_argument("--format", choices=["json"], default="json")
    a.set_defaults(func=cmd_analyze)

    f = common(sub.add_parser("family", help="sweep a family parameter"))
    f.add_argument("--family", required=True)
    f.add_argument("--range", required=True, type=_parse_range)
    f.add_argument("--eta", type=float, default=0.05)
    f.add_argument("--rho", type=float, default=0.05)
    f.add_argument("--spacing", default=DEFAULT_SPACING)
    f.add_argument("--format", choices=["csv", "json"], default="csv")
    f.add_argument("--no-timing", action="store_true", help="write runtime_ms as 0 for byte-stable output")
    f.set_defaults(func=cmd_family)

    w = common(sub.add_parser("witness-powers", help="verify the f^k non-separation witness"))
    w.add_argument("--k", type=int, required=True)
    w.add_argument("--m", type=int, required=True)
    w.add_argument("--levels", type=int, default=None)
    w.add_argument("--spacing", default=DEFAULT_SPACING)
    w.set_defaults(func=cmd_witness)

    o = common(sub.add_parser("oracle-check", help="fixed point vs brute force on random systems"))
    o.add_argument("--samples", type=int, default=100)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--max-points", type=int, default=48)
    o.add_argument("--dump-dir", default=None)
    o.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvariantViolation as e:
        print(f"invariant violation: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ValidationError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
