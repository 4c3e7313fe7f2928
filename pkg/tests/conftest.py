import numpy as np
import pytest
from hypothesis import strategies as st

from sepdyn import DynSystem, MetricSpace, WineParams, gen_wine


@pytest.fixture(scope="session")
def wine6():
    return gen_wine(WineParams(6))


@pytest.fixture(scope="session")
def wine2():
    return gen_wine(WineParams(2))


def system_from(coords, perm):
    return DynSystem(MetricSpace.from_coordinates(np.asarray(coords, dtype=float)), np.asarray(perm))


@st.composite
def systems(draw, max_n=12, grid=6):
    """Small systems on an integer grid, so equal distances (ties at eta) are common."""
    n = draw(st.integers(1, max_n))
    cells = draw(
        st.lists(st.tuples(st.integers(0, grid), st.integers(0, grid)), min_size=n, max_size=n, unique=True)
    )
    perm = draw(st.permutations(range(n)))
    return system_from(cells, perm)


@st.composite
def systems_with_eta(draw, **kw):
    s = draw(systems(**kw))
    dd = s.space.distinct_distances
    if dd.size == 0 or draw(st.booleans()):
        eta = draw(st.floats(0, 10, allow_nan=False))
    else:
        eta = float(draw(st.sampled_from(dd.tolist())))
    return s, eta


# acceptance criteria report one line each at the end of the run
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def record(criterion: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE[criterion] = (bool(ok), detail)
    print(f"[{'PASS' if ok else 'FAIL'}] {criterion} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
