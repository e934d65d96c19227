import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from hermsiegel.ring import field  # noqa: E402
from hermsiegel.lattice import lattice_from_invariants, random_unimodular, rebased  # noqa: E402


@pytest.fixture(scope="session")
def F3():
    return field(3)


@pytest.fixture(scope="session")
def F5():
    return field(5)


@pytest.fixture
def rng():
    return random.Random(20240811)


def random_invariants(rng, max_rank, max_val, min_rank=1):
    r = rng.randint(min_rank, max_rank)
    while True:
        invs = sorted(rng.randint(0, max_val) for _ in range(r))
        if sum(invs) <= max_val:
            return tuple(invs)


def random_lattice(fld, rng, max_rank=4, max_val=6):
    invs = random_invariants(rng, max_rank, max_val)
    L = lattice_from_invariants(fld, invs)
    return rebased(L, random_unimodular(fld, L.rank, rng))
