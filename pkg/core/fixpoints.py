"""
Torus fixed points of Gr_1(M)

A fixed point puts one box over every vertex of the cycle, closed under
the Jordan map (the box over v+1 is J of the box over v unless J kills
it).  The vertices where J kills the box form the ending set; cutting the
cycle after each of them yields the movable parts.
"""

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import Any, Dict, List, Sequence, Tuple, Union

from core.errors import InstanceError
from core.model import Box, Instance, box_leq, cweight, jmap
from utils.helpers import timed
from utils.logger import setup_logger

logger = setup_logger(__name__)


@dataclass(frozen=True)
class FixedPoint:
    """One box per vertex 0..n-1"""
    boxes: Tuple[Box, ...]

    @property
    def n(self) -> int:
        return len(self.boxes)

    def box(self, v: int) -> Box:
        return self.boxes[v % len(self.boxes)]

    def to_json(self) -> Dict[str, Any]:
        return {"boxes": [b.to_json() for b in self.boxes]}


@dataclass(frozen=True)
class MovablePart:
    """Maximal J-chain over vertices start, ..., start+length (mod n)"""
    start: int
    length: int
    block: int

    def vertices(self, n: int) -> List[int]:
        return [(self.start + r) % n for r in range(self.length + 1)]

    def end(self, n: int) -> int:
        return (self.start + self.length) % n


def is_successor_closed(p: FixedPoint, inst: Instance) -> bool:
    for v in range(inst.n):
        image = jmap(p.box(v), inst)
        if image is not None and image != p.box(v + 1):
            return False
    return True


def validate_point(p: FixedPoint, inst: Instance) -> FixedPoint:
    if p.n != inst.n:
        raise InstanceError(f"fixed point has {p.n} boxes, instance has n={inst.n}")
    for b in p.boxes:
        b.validate(inst)
    if not is_successor_closed(p, inst):
        raise InstanceError(f"{format_point(p, inst)} is not successor-closed")
    return p


def ending_set(p: FixedPoint, inst: Instance) -> Tuple[int, ...]:
    """Vertices whose box is killed by J, sorted"""
    return tuple(v for v in range(inst.n) if jmap(p.box(v), inst) is None)


def _interval_lengths(ends: Sequence[int], n: int) -> List[int]:
    return [(e - ends[k - 1] - 1) % n + 1 for k, e in enumerate(ends)]


def _build_point(ends: Sequence[int], blocks: Sequence[int], inst: Instance) -> FixedPoint:
    assignment: List[Box] = [None] * inst.n
    for e, a, s in zip(ends, _interval_lengths(ends, inst.n), blocks):
        j = inst.block_size(s)
        for r in range(a):
            assignment[(e - a + 1 + r) % inst.n] = Box(s, j - a + 1 + r)
    return FixedPoint(tuple(assignment))


def movable_parts(p: FixedPoint, inst: Instance) -> List[MovablePart]:
    """Movable parts in ending-set order"""
    ends = ending_set(p, inst)
    return [
        MovablePart((e - a + 1) % inst.n, a - 1, p.box(e).l)
        for e, a in zip(ends, _interval_lengths(ends, inst.n))
    ]


def canonical_key(p: FixedPoint, inst: Instance) -> Tuple:
    ends = ending_set(p, inst)
    return (ends, tuple(p.box(e).l for e in ends))


@timed("enumerate_fixed_points")
def enumerate_fixed_points(inst: Instance) -> List[FixedPoint]:
    """
    All fixed points, in canonical order

    Each nonempty ending set splits the cycle into intervals; an interval
    of length a can be filled by the tail of any block with j_s >= a.

    Args:
        inst: Instance to enumerate

    Returns:
        Fixed points sorted by (ending set, block per interval)
    """
    points: List[Tuple[Tuple, FixedPoint]] = []
    for size in range(1, inst.n + 1):
        for ends in combinations(range(inst.n), size):
            choices = [
                [s for s in range(1, inst.M + 1) if inst.block_size(s) >= a]
                for a in _interval_lengths(ends, inst.n)
            ]
            for blocks in product(*choices):
                points.append(((ends, blocks), _build_point(ends, blocks, inst)))
    points.sort(key=lambda kp: kp[0])
    logger.debug(f"{inst}: {len(points)} fixed points")
    return [p for _, p in points]


@lru_cache(maxsize=64)
def fixed_points(inst: Instance) -> Tuple[FixedPoint, ...]:
    """Cached, immutable enumeration shared by the downstream modules"""
    return tuple(enumerate_fixed_points(inst))


def count_fixed_points(inst: Instance) -> int:
    """Closed count: sum over ending sets of the product of block choices"""
    total = 0
    for size in range(1, inst.n + 1):
        for ends in combinations(range(inst.n), size):
            term = 1
            for a in _interval_lengths(ends, inst.n):
                term *= sum(1 for j in inst.blocks if j >= a)
            total += term
    return total


def fp_leq(p: FixedPoint, q: FixedPoint, inst: Instance) -> bool:
    return all(box_leq(p.box(v), q.box(v), inst) for v in range(inst.n))


def _require_single_block(inst: Instance, what: str) -> None:
    if inst.M != 1:
        raise InstanceError(f"{what} is only defined for a single Jordan block (M = 1), got M = {inst.M}")


def encode_subset(p: FixedPoint, inst: Instance) -> Tuple[int, ...]:
    _require_single_block(inst, "subset encoding")
    return ending_set(p, inst)


def decode_subset(subset: Sequence[int], inst: Instance) -> FixedPoint:
    """Fixed point whose ending set is the given nonempty subset of Z/nZ"""
    _require_single_block(inst, "subset decoding")
    ends = tuple(sorted(set(subset)))
    if not ends:
        raise InstanceError("ending set must be nonempty")
    if any(not 0 <= e < inst.n for e in ends):
        raise InstanceError(f"ending set {list(ends)} is not a subset of Z/{inst.n}Z")
    if max(_interval_lengths(ends, inst.n)) > inst.N:
        raise InstanceError(f"ending set {list(ends)} has a cyclic gap larger than N={inst.N}")
    return _build_point(ends, [1] * len(ends), inst)


def subset_codec(value: Union[FixedPoint, Sequence[int]], inst: Instance):
    """Encode a point as its ending set or decode an ending set to a point"""
    if isinstance(value, FixedPoint):
        return encode_subset(value, inst)
    return decode_subset(value, inst)


def fp_meet(p: FixedPoint, q: FixedPoint, inst: Instance) -> FixedPoint:
    """Point with ending set I_p | I_q; its closed cell is the intersection of theirs"""
    _require_single_block(inst, "fp_meet")
    return decode_subset(set(ending_set(p, inst)) | set(ending_set(q, inst)), inst)


def reduce_N(inst: Instance) -> Instance:
    _require_single_block(inst, "reduce_N")
    if inst.N >= inst.n:
        return Instance(inst.n, (inst.n,))
    return inst


def transport_point(p: FixedPoint, inst: Instance, target: Instance) -> FixedPoint:
    """Carry a single-block point to another block size through its ending set"""
    return decode_subset(encode_subset(p, inst), target)


def embed_point(p: FixedPoint, inst: Instance, target: Instance) -> FixedPoint:
    """Embedding for N <= N': pad with leading zeros, v_i -> v_{i + N' - N}"""
    _require_single_block(inst, "embed_point")
    _require_single_block(target, "embed_point")
    if target.n != inst.n or target.N < inst.N:
        raise InstanceError(f"cannot embed {inst} into {target}")
    shift = target.N - inst.N
    return FixedPoint(tuple(Box(1, b.i + shift) for b in p.boxes))


def point_weights(p: FixedPoint, inst: Instance) -> Tuple[int, ...]:
    return tuple(cweight(b, inst) for b in p.boxes)


def format_point(p: FixedPoint, inst: Instance) -> str:
    """I={0,1} for a single block, boxes=l.i,... otherwise"""
    if inst.M == 1 and p.n == inst.n and is_successor_closed(p, inst):
        return "I={" + ",".join(map(str, ending_set(p, inst))) + "}"
    return "boxes=" + ",".join(f"{b.l}.{b.i}" for b in p.boxes)


def point_to_json(p: FixedPoint, inst: Instance) -> Dict[str, Any]:
    data = p.to_json()
    if inst.M == 1:
        data["I"] = list(ending_set(p, inst))
    return data


_SUBSET_RE = re.compile(r"(?:I=)?\{([\d,\s]*)\}")


def parse_point(text: str, inst: Instance) -> FixedPoint:
    """
    Parse a fixed point from the command line

    Accepts I={0,1} (single block), boxes=1.3,1.1,1.2 or a JSON box list.
    """
    text = text.strip()
    match = _SUBSET_RE.fullmatch(text)
    if match:
        items = [s for s in match.group(1).split(",") if s.strip()]
        return decode_subset([int(s) for s in items], inst)
    if text.startswith("boxes="):
        try:
            pairs = [item.split(".") for item in text[len("boxes="):].split(",")]
            boxes = tuple(Box(int(l), int(i)) for l, i in pairs)
        except ValueError as e:
            raise InstanceError(f"cannot parse {text!r}: {e}") from e
        return validate_point(FixedPoint(boxes), inst)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceError(f"cannot parse fixed point {text!r}") from e
    if isinstance(data, dict):
        if "I" in data:
            return decode_subset(data["I"], inst)
        data = data.get("boxes")
    try:
        boxes = tuple(Box(int(l), int(i)) for l, i in data)
    except (TypeError, ValueError) as e:
        raise InstanceError(f"cannot parse fixed point {text!r}") from e
    return validate_point(FixedPoint(boxes), inst)
