"""Expansivity-hierarchy verdicts at a fixed resolution, critical constants,
and instance checks of the separating-implies-periodic theorem."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chains import epsilon_candidates, resolve_epsilon
from .gamma import GammaProfile, gamma_profile, orbit_extrema
from .systems import DynSystem

__all__ = [
    "ClassificationReport",
    "Threshold",
    "UNBOUNDED",
    "CriticalConstants",
    "TheoremReport",
    "classify",
    "classify_profile",
    "critical_constants",
    "theorem_checks",
    "hierarchy_violations",
]

UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class ClassificationReport:
    eta: float
    epsilon: float
    expansive_at: bool
    separating_at: bool
    separating_witness: tuple[int, int] | None
    min_N: int
    isolation_margin: float | None
    cw_at_resolution: bool

    def to_dict(self) -> dict:
        return {
            "eta": self.eta,
            "epsilon": self.epsilon,
            "expansive_at": self.expansive_at,
            "separating_at": self.separating_at,
            "separating_witness": None if self.separating_witness is None else list(self.separating_witness),
            "min_N": self.min_N,
            "isolation_margin": self.isolation_margin,
            "cw_at_resolution": self.cw_at_resolution,
        }


def _outside_orbit(sys: DynSystem, prof: GammaProfile) -> np.ndarray:
    cyc = sys.orbits.cycle_of
    return prof.matrix & (cyc[:, None] != cyc[None, :])


def classify_profile(sys: DynSystem, prof: GammaProfile, epsilon: float) -> ClassificationReport:
    """Verdicts from an already computed Gamma profile."""
    epsilon = float(epsilon)
    if not epsilon >= 0:
        raise ValueError(f"epsilon must be non-negative, got {epsilon!r}")
    bad = np.argwhere(_outside_orbit(sys, prof))
    witness = tuple(int(v) for v in bad[0]) if len(bad) else None

    off = prof.matrix & ~np.eye(sys.n, dtype=bool)
    margin = float(sys.dist[off].min()) if off.any() else None
    # cw at resolution: no two distinct members of one Gamma-set are epsilon-close
    close = (sys.dist < epsilon) & ~np.eye(sys.n, dtype=bool)
    cw = True
    if close.any() and off.any():
        g = prof.matrix.astype(float)
        shared = g.T @ g  # shared[y, z] > 0 iff y, z lie in a common Gamma-set
        cw = not np.any(shared[close] > 0)
    min_n = prof.max_card
    return ClassificationReport(
        eta=prof.eta,
        epsilon=epsilon,
        expansive_at=min_n == 1,
        separating_at=witness is None,
        separating_witness=witness,
        min_N=min_n,
        isolation_margin=margin,
        cw_at_resolution=cw,
    )


def classify(sys: DynSystem, eta, epsilon=None) -> ClassificationReport:
    """Classify ``sys`` at resolution ``eta``.

    ``epsilon`` is the chain resolution for the cw check; by default the
    value :func:`resolve_epsilon` picks for ``eta``.
    """
    prof = gamma_profile(sys, eta)
    if epsilon is None:
        epsilon = resolve_epsilon(sys.space, eta) if prof.eta > 0 else 0.0
    return classify_profile(sys, prof, epsilon)


@dataclass(frozen=True)
class Threshold:
    """Property holds for every eta below ``value``; ``strict`` means it fails at ``value``."""

    value: float
    strict: bool = True

    def to_dict(self) -> dict:
        return {"value": self.value, "attained": "strict" if self.strict else "non-strict"}


def _threshold_json(t):
    return UNBOUNDED if t == UNBOUNDED else t.to_dict()


@dataclass(frozen=True)
class CriticalConstants:
    expansive_threshold: Threshold | str
    separating_threshold: Threshold | str
    candidate_set: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "expansive_threshold": _threshold_json(self.expansive_threshold),
            "separating_threshold": _threshold_json(self.separating_threshold),
            "candidate_set": list(self.candidate_set),
        }


def critical_constants(sys: DynSystem) -> CriticalConstants:
    # y in Gamma_eta(x) iff sup_t d(f^t x, f^t y) <= eta, so each property
    # holds exactly for eta below the smallest offending sup-distance
    sup, _ = orbit_extrema(sys)
    n = sys.n
    off = ~np.eye(n, dtype=bool)
    cyc = sys.orbits.cycle_of
    cross = cyc[:, None] != cyc[None, :]
    cands = tuple(float(v) for v in np.unique(sup[off]))
    exp_t = Threshold(float(sup[off].min())) if n > 1 else UNBOUNDED
    sep_t = Threshold(float(sup[cross].min())) if cross.any() else UNBOUNDED
    return CriticalConstants(exp_t, sep_t, cands)


def hierarchy_violations(sys: DynSystem, prof: GammaProfile) -> list[dict]:
    """Finite-scale implications: expansive => separating => card(Gamma) <= card(O).

    Returns an empty list when every implication holds.
    """
    rep = classify_profile(sys, prof, 0.0)
    out = []
    if rep.expansive_at and not rep.separating_at:
        out.append({"implication": "expansive=>separating", "ids": list(rep.separating_witness)})
    if rep.separating_at:
        too_big = np.flatnonzero(prof.cards > sys.orbits.period_of)
        if too_big.size:
            out.append({"implication": "separating=>card<=orbit", "ids": too_big.tolist()})
    return out


@dataclass(frozen=True)
class TheoremReport:
    eta: float
    epsilon: float | None
    premise_separating: bool
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c["status"] != "fail" for c in self.checks.values())

    def to_dict(self) -> dict:
        return {
            "eta": self.eta,
            "epsilon": self.epsilon,
            "premise_separating": self.premise_separating,
            "checks": self.checks,
            "passed": self.passed,
        }


def _theorem_epsilon(sys: DynSystem, eta: float) -> float:
    # chain classes of diameter < eta, and epsilon itself below eta
    eps = resolve_epsilon(sys.space, eta)
    if eps < eta:
        return eps
    below = [c for c in epsilon_candidates(sys.space) if c < eta]
    return below[-1] if below else eta / 2


def theorem_checks(sys: DynSystem, eta) -> TheoremReport:
    """Check, at finite scale, that a separating constant eta yields an
    epsilon with Gamma_epsilon(x) != {x} only inside x's periodic orbit.

    An unmet premise is reported, not raised; the hierarchy check at eta
    runs regardless.
    """
    prof = gamma_profile(sys, eta)
    eta = prof.eta
    premise = not _outside_orbit(sys, prof).any()
    checks: dict[str, dict] = {}

    viol = hierarchy_violations(sys, prof)
    checks["hierarchy"] = {"status": "fail", "counterexample": viol} if viol else {"status": "pass"}

    if not premise:
        eps = None
        checks["gamma_in_orbit"] = {"status": "skipped", "reason": "eta is not a separating constant"}
        checks["nontrivial_gamma_periodic"] = {"status": "skipped", "reason": "eta is not a separating constant"}
        return TheoremReport(eta, eps, premise, checks)

    eps = _theorem_epsilon(sys, eta) if eta > 0 else 0.0
    small = gamma_profile(sys, eps)
    bad = np.argwhere(_outside_orbit(sys, small))
    checks["gamma_in_orbit"] = (
        {"status": "fail", "counterexample": bad[0].tolist()} if len(bad) else {"status": "pass"}
    )
    # every point of a finite bijection is periodic; what can fail is
    # Gamma_epsilon(x) leaving the cycle of x
    nontrivial = np.flatnonzero(small.cards > 1)
    leaving = set(bad[:, 0].tolist())
    failing = [int(x) for x in nontrivial if x in leaving]
    checks["nontrivial_gamma_periodic"] = (
        {"status": "fail", "counterexample": failing}
        if failing
        else {"status": "pass", "nontrivial_points": int(nontrivial.size)}
    )
    return TheoremReport(eta, eps, premise, checks)
