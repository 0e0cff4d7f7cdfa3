import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ncrank.exactlin import Field
from ncrank.matspace import MatrixSpace
from ncrank.quiver import Arrow, Quiver, Representation

settings.register_profile(
    "ncrank", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("ncrank")

# x1 A1 + x2 A2 + x3 A3 is the 3x3 skew-symmetric matrix with x1, x2, x3 above the diagonal
SKEW3 = (
    [[0, 1, 0], [-1, 0, 0], [0, 0, 0]],
    [[0, 0, 1], [0, 0, 0], [-1, 0, 0]],
    [[0, 0, 0], [0, 0, 1], [0, -1, 0]],
)
BIG_P = 1000003


@pytest.fixture
def skew3_space():
    return MatrixSpace.from_matrices(Field.prime(BIG_P), SKEW3)


@pytest.fixture
def skew3_rep():
    return Representation.kronecker(Field.prime(BIG_P), SKEW3)


def random_space(rng, F, rows, cols, m, max_rank=None):
    mats = []
    for _ in range(m):
        if max_rank is None:
            mats.append(F.random(rng, (rows, cols)))
        else:
            mats.append(F.matmul(F.random(rng, (rows, max_rank)), F.random(rng, (max_rank, cols))))
    return MatrixSpace(F, rows, cols, mats)


def sparse_matrix(rng, F, shape, density=0.4):
    a = F.random(rng, shape)
    mask = rng.random(shape) < density
    return F.reduce(a * mask)


def random_three_vertex(rng, F, max_dim=2):
    """A random acyclic quiver on x, y, z with 1 to 4 arrows and a representation."""
    vs = ("x", "y", "z")
    pairs = [("x", "y"), ("y", "z"), ("x", "z")]
    arrows = []
    for i in range(int(rng.integers(1, 5))):
        t, h = pairs[int(rng.integers(0, 3))]
        arrows.append(Arrow(f"a{i}", t, h))
    q = Quiver(vs, tuple(arrows))
    dims = {v: int(rng.integers(0, max_dim + 1)) for v in vs}
    maps = {a.name: sparse_matrix(rng, F, (dims[a.head], dims[a.tail]), 0.6) for a in arrows}
    return Representation(q, F, dims, maps)


def random_weight(rng, q, lo=-2, hi=2):
    return {v: int(rng.integers(lo, hi + 1)) for v in q.vertices}


# -- acceptance verdicts ------------------------------------------------------

_VERDICTS = pytest.StashKey[dict]()
CRITERIA = range(1, 11)


def pytest_configure(config):
    config.stash[_VERDICTS] = {}


@pytest.fixture
def verdict(request):
    """verdict(k, title, ok, detail): print and record one PASS/FAIL line, then assert ok."""
    store = request.config.stash[_VERDICTS]

    def record(k, title, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'} criterion {k:>2}: {title}" + (f" ({detail})" if detail else "")
        store[k] = line
        print(line)
        assert ok, line

    return record


_RAN_ACCEPTANCE = pytest.StashKey[bool]()


def pytest_collection_modifyitems(config, items):
    config.stash[_RAN_ACCEPTANCE] = any(item.get_closest_marker("acceptance") for item in items)


def pytest_terminal_summary(terminalreporter, config):
    store = config.stash.get(_VERDICTS, {})
    if not config.stash.get(_RAN_ACCEPTANCE, False):
        return
    terminalreporter.section("acceptance criteria")
    for k in CRITERIA:
        terminalreporter.write_line(store.get(k, f"FAIL criterion {k:>2}: did not run to completion"))
