from __future__ import annotations

import pytest

from cubetest.core import BitString, RngStream
from cubetest.families import MonoInstance


def make_handbuilt_mono(world: str = "no") -> MonoInstance:
    """Small explicit two-level instance used by several hand-trace tests.

    n=16, two meaningful terms {0,1,2,3} and {4,5,6,7}; the clause row of
    term 0 is {8,9,10,11} at cell (0,0) and the single variable 12
    elsewhere; dictators all read coordinate 13.  The remaining terms
    require coordinate 13, so queries with x_13 = 0 never satisfy them.
    """
    n, N, m = 16, 4, 4
    terms = [
        [0, 1, 2, 3],
        [4, 5, 6, 7],
        [13, 13, 13, 13],
        [13, 13, 13, 13],
    ]
    clauses = []
    for i in range(N):
        row = []
        for j in range(N):
            if i == 0 and j == 0:
                row.append([8, 9, 10, 11])
            else:
                row.append([12, 12, 12, 12])
        clauses.append(row)
    dictators = [[13] * N for _ in range(N)]
    return MonoInstance.from_parts(n, world, terms, clauses, dictators)


def random_middle(inst, rng: RngStream) -> BitString:
    while True:
        x = BitString.random(inst.n, rng)
        if inst.weight_class(x) == "middle":
            return x


@pytest.fixture
def rng() -> RngStream:
    return RngStream(20260809, "tests")
