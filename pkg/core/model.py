"""
Input datum: the cyclic quiver size n and the Jordan partition of J

Boxes of the Young tableau are the Jordan basis vectors v_i^l.  Their
C*-weights define the twisted lexicographic order; their T-weights depend
on the vertex they sit over.
"""

import json
import numbers
from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from core.errors import InstanceError
from core.exactalg import T0, Character, VarId
from utils.logger import setup_logger

logger = setup_logger(__name__)


class Ordering(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


@dataclass(frozen=True)
class Instance:
    """n vertices of the cycle and Jordan blocks j_1 >= ... >= j_M"""
    n: int
    blocks: Tuple[int, ...]

    def __post_init__(self):
        if any(isinstance(j, bool) or not isinstance(j, numbers.Integral) for j in self.blocks):
            raise InstanceError(f"block sizes must be integers, got {list(self.blocks)}")
        object.__setattr__(self, "blocks", tuple(int(j) for j in self.blocks))
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise InstanceError(f"n must be an integer >= 1, got {self.n!r}")
        if not self.blocks:
            raise InstanceError("at least one Jordan block is required (M >= 1)")
        if any(j < 1 for j in self.blocks):
            raise InstanceError(f"block sizes must be >= 1, got {list(self.blocks)}")
        if any(a < b for a, b in zip(self.blocks, self.blocks[1:])):
            raise InstanceError(f"blocks must be sorted non-increasing, got {list(self.blocks)}")

    @property
    def M(self) -> int:
        return len(self.blocks)

    @property
    def N(self) -> int:
        return sum(self.blocks)

    def block_size(self, l: int) -> int:
        return self.blocks[l - 1]

    def boxes(self) -> List["Box"]:
        return [Box(l, i) for l in range(1, self.M + 1) for i in range(1, self.block_size(l) + 1)]

    def variables(self) -> List[VarId]:
        return [T0] + [VarId(s, r) for s in range(1, self.M + 1) for r in range(self.n)]

    def vertex(self, v: int) -> int:
        return v % self.n

    def __str__(self) -> str:
        return f"n={self.n};blocks={','.join(map(str, self.blocks))}"

    def to_json(self) -> Dict[str, Any]:
        return {"n": self.n, "blocks": list(self.blocks)}

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "Instance":
        try:
            return cls(data["n"], tuple(data["blocks"]))
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, InstanceError):
                raise
            raise InstanceError(f"instance JSON needs 'n' and 'blocks': {e}") from e

    @classmethod
    def parse(cls, text: str) -> "Instance":
        """
        Parse an instance from inline form or a JSON file

        Args:
            text: "n=3;blocks=3,2" or a path to {"n": 3, "blocks": [3, 2]}

        Returns:
            Validated instance
        """
        text = text.strip()
        path = Path(text)
        if not text.startswith("n=") and path.exists():
            try:
                with open(path, 'r', encoding='utf-8') as f:
                    return cls.from_json(json.load(f))
            except json.JSONDecodeError as e:
                raise InstanceError(f"{path}: invalid JSON: {e}") from e
            except OSError as e:
                raise InstanceError(f"{path}: cannot read instance file: {e}") from e

        fields: Dict[str, str] = {}
        for part in filter(None, (p.strip() for p in text.split(";"))):
            key, sep, value = part.partition("=")
            if not sep:
                raise InstanceError(f"expected key=value, got {part!r}")
            fields[key.strip()] = value.strip()
        if set(fields) != {"n", "blocks"}:
            raise InstanceError(f"inline instance needs exactly n and blocks, got {sorted(fields)}")
        try:
            n = int(fields["n"])
            blocks = tuple(int(b) for b in fields["blocks"].split(","))
        except ValueError as e:
            raise InstanceError(f"instance values must be integers: {e}") from e
        return cls(n, blocks)


@dataclass(frozen=True, order=True)
class Box:
    """Basis vector v_i^l, i.e. box i of row l in the tableau"""
    l: int
    i: int

    def dist(self, inst: Instance) -> int:
        return inst.block_size(self.l) - self.i

    def validate(self, inst: Instance) -> "Box":
        if not 1 <= self.l <= inst.M or not 1 <= self.i <= inst.block_size(self.l):
            raise InstanceError(f"box v_{self.i}^{self.l} does not exist for blocks {list(inst.blocks)}")
        return self

    def to_json(self) -> List[int]:
        return [self.l, self.i]

    def __str__(self) -> str:
        return f"v{self.i}^{self.l}"


def cweight(b: Box, inst: Instance) -> int:
    """C*-weight l - M*(j_l - i)"""
    return b.l - inst.M * b.dist(inst)


def tweight(b: Box, v: int, inst: Instance) -> Character:
    """T-weight of v_i^l over vertex v: (i-1)*t0 + t[j_l - i + v][l]"""
    return Character({T0: b.i - 1, VarId.rot(b.dist(inst) + v, b.l, inst.n): 1})


def box_compare(a: Box, b: Box, inst: Instance) -> Ordering:
    """Twisted lexicographic order, decided by C*-weights"""
    wa, wb = cweight(a, inst), cweight(b, inst)
    if wa < wb:
        return Ordering.LESS
    if wa > wb:
        return Ordering.GREATER
    return Ordering.EQUAL


def box_leq(a: Box, b: Box, inst: Instance) -> bool:
    return cweight(a, inst) <= cweight(b, inst)


def jmap(b: Box, inst: Instance) -> Optional[Box]:
    """Jordan map v_i^l -> v_{i+1}^l, None for the zero vector"""
    if b.i < inst.block_size(b.l):
        return Box(b.l, b.i + 1)
    return None


@lru_cache(maxsize=None)
def count_greater(b: Box, inst: Instance) -> int:
    w = cweight(b, inst)
    return sum(1 for other in inst.boxes() if cweight(other, inst) > w)


def sorted_boxes(inst: Instance) -> List[Box]:
    """All boxes in increasing twisted order"""
    return sorted(inst.boxes(), key=lambda b: cweight(b, inst))


def partitions(total: int, largest: Optional[int] = None) -> List[Tuple[int, ...]]:
    """Partitions of total as non-increasing tuples, lexicographically decreasing"""
    if largest is None:
        largest = total
    if total == 0:
        return [()]
    return [
        (first,) + rest
        for first in range(min(total, largest), 0, -1)
        for rest in partitions(total - first, first)
    ]
