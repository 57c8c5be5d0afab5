import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from core.fixpoints import decode_subset
from core.model import Instance, partitions


def small_instances(max_n: int = 4, max_N: int = 5):
    return [
        Instance(n, blocks)
        for n in range(1, max_n + 1)
        for total in range(1, max_N + 1)
        for blocks in partitions(total)
    ]


@pytest.fixture
def single3():
    return Instance(3, (3,))


@pytest.fixture
def two_block():
    return Instance(3, (3, 2))


@pytest.fixture
def subset(single3):
    """Fixed point of the single-block instance from its ending set"""
    def make(*ends):
        return decode_subset(ends, single3)
    return make
