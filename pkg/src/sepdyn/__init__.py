"""Expansivity, separation and recurrence for finite metric dynamical systems."""

from .chains import ChainPartition, chain_partition, chain_partition_bfs, resolve_epsilon
from .classify import (
    UNBOUNDED,
    ClassificationReport,
    CriticalConstants,
    TheoremReport,
    classify,
    critical_constants,
    theorem_checks,
)
from .exemplars import (
    InvariantViolation,
    WineParams,
    WitnessCase,
    gen_circle,
    gen_double_circle,
    gen_identity_space,
    gen_power_witness,
    gen_random,
    gen_wine,
)
from .gamma import GammaProfile, gamma_oracle, gamma_profile
from .recurrence import (
    CapExceeded,
    asymptotic_scan,
    cyclic_group_expansivity,
    minimality,
    recurrence_profile,
)
from .systems import (
    DynSystem,
    MetricSpace,
    OrbitDecomposition,
    ValidationError,
    dump_system,
    load_system,
    orbit_decomposition,
    power_system,
    read_system,
    write_system,
)

__version__ = "0.1.0"
