"""
GKM graph of Gr_1(M)

Edges come from mutations of a single movable part: either the whole part
moves to a lower tableau row (type 1) or its first i+1 boxes are replaced
by the tail of some row while the rest of the part stays put (type 2).
Labels are tangent weights at the target; the weight at the source is the
negative.
"""

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, List, Sequence, Tuple

from core.cells import cell_tangents
from core.errors import InstanceError
from core.exactalg import T0, Character, Polynomial, VarId, product, rho_shift_character
from core.fixpoints import (FixedPoint, MovablePart, fixed_points, format_point,
                            movable_parts, point_to_json, validate_point)
from core.model import Box, Instance, tweight
from utils.logger import setup_logger

logger = setup_logger(__name__)


@dataclass(frozen=True)
class Mutation:
    """Split a part after offset `split` and move offsets 0..split to block `block`"""
    part: MovablePart
    split: int
    block: int

    @property
    def kind(self) -> int:
        return 1 if self.split == self.part.length else 2

    def to_json(self) -> Dict[str, Any]:
        return {
            "part": {"start": self.part.start, "length": self.part.length, "block": self.part.block},
            "split": self.split,
            "block": self.block,
            "type": self.kind,
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "Mutation":
        part = data["part"]
        return cls(MovablePart(part["start"], part["length"], part["block"]),
                   data["split"], data["block"])


@dataclass(frozen=True)
class GkmEdge:
    src: FixedPoint
    dst: FixedPoint
    label: Character
    mutation: Mutation


def part_mutations(part: MovablePart, inst: Instance) -> List[Mutation]:
    """All mutations of one part, type 2 splits first, then type 1 row moves"""
    m, l = part.length, part.block
    found = [
        Mutation(part, i, k)
        for i in range(m)
        for k in range(1, inst.M + 1)
        if inst.block_size(k) >= i + 1
    ]
    found.extend(
        Mutation(part, m, k)
        for k in range(l + 1, inst.M + 1)
        if inst.block_size(k) >= m + 1
    )
    return found


def mutations(p: FixedPoint, inst: Instance) -> List[Mutation]:
    return [mu for part in movable_parts(p, inst) for mu in part_mutations(part, inst)]


def validate_mutation(p: FixedPoint, mu: Mutation, inst: Instance) -> None:
    part = mu.part
    if part not in movable_parts(p, inst):
        raise InstanceError(f"{part} is not a movable part of {format_point(p, inst)}")
    if not 0 <= mu.split <= part.length:
        raise InstanceError(f"split offset {mu.split} outside 0..{part.length}")
    if not 1 <= mu.block <= inst.M:
        raise InstanceError(f"block {mu.block} outside 1..{inst.M}")
    if inst.block_size(mu.block) < mu.split + 1:
        raise InstanceError(f"block {mu.block} is too short for {mu.split + 1} boxes")
    if mu.kind == 1 and mu.block <= part.block:
        raise InstanceError("a whole-part move must go to a lower row (k > l)")


def apply_mutation(p: FixedPoint, mu: Mutation, inst: Instance) -> FixedPoint:
    validate_mutation(p, mu, inst)
    boxes = list(p.boxes)
    j = inst.block_size(mu.block)
    for r in range(mu.split + 1):
        boxes[(mu.part.start + r) % inst.n] = Box(mu.block, j - mu.split + r)
    return FixedPoint(tuple(boxes))


def edge_label(p: FixedPoint, mu: Mutation, inst: Instance) -> Character:
    """t[m+g][l] + (j_l - j_k + i - m)*t0 - t[i+g][k] for a part starting at g"""
    g, m, l = mu.part.start, mu.part.length, mu.part.block
    i, k = mu.split, mu.block
    return Character({
        VarId.rot(m + g, l, inst.n): 1,
        T0: inst.block_size(l) - inst.block_size(k) + i - m,
    }) - Character({VarId.rot(i + g, k, inst.n): 1})


def label_by_weights(p: FixedPoint, q: FixedPoint, start: int, inst: Instance) -> Character:
    """Weight difference of the start boxes over the part's first vertex"""
    return tweight(p.box(start), start, inst) - tweight(q.box(start), start, inst)


@dataclass(frozen=True)
class GkmGraph:
    inst: Instance
    edges: Tuple[GkmEdge, ...]
    outgoing: Dict[FixedPoint, List[GkmEdge]] = field(init=False, repr=False, compare=False)
    incoming: Dict[FixedPoint, List[GkmEdge]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        outgoing: Dict[FixedPoint, List[GkmEdge]] = {p: [] for p in fixed_points(self.inst)}
        incoming: Dict[FixedPoint, List[GkmEdge]] = {p: [] for p in fixed_points(self.inst)}
        for e in self.edges:
            outgoing[e.src].append(e)
            incoming[e.dst].append(e)
        object.__setattr__(self, "outgoing", outgoing)
        object.__setattr__(self, "incoming", incoming)

    def out_degree(self, p: FixedPoint) -> int:
        return len(self.outgoing[p])


@lru_cache(maxsize=64)
def build_graph(inst: Instance) -> GkmGraph:
    points = fixed_points(inst)
    position = {p: k for k, p in enumerate(points)}
    edges: List[GkmEdge] = []
    for p in points:
        for mu in mutations(p, inst):
            q = apply_mutation(p, mu, inst)
            edges.append(GkmEdge(p, q, edge_label(p, mu, inst), mu))
    edges.sort(key=lambda e: (position[e.src], position[e.dst]))
    logger.info(f"{inst}: GKM graph with {len(points)} vertices and {len(edges)} edges")
    return GkmGraph(inst, tuple(edges))


def gkm_graph(inst: Instance) -> List[GkmEdge]:
    return list(build_graph(inst).edges)


def euler_weights(z: FixedPoint, y: FixedPoint, inst: Instance) -> List[Character]:
    """
    Tangent weights of the closed cell of y at the fixed point z

    Each weight belongs to a T-curve of the closed cell through z, which is
    a graph edge: an incoming edge contributes its label, an outgoing edge
    the negated label.

    Raises:
        InstanceError: when z is not in the closed cell of y
    """
    return [weight for weight, _ in cell_tangents(z, y, inst)]


def euler_class(z: FixedPoint, y: FixedPoint, inst: Instance) -> Polynomial:
    return product(euler_weights(z, y, inst))


def rotate(p: FixedPoint, steps: int) -> FixedPoint:
    """Rotate the quiver: the result carries p's box from v - steps over v"""
    n = p.n
    return FixedPoint(tuple(p.box((v - steps) % n) for v in range(n)))


def rotate_edge(e: GkmEdge, steps: int, inst: Instance) -> GkmEdge:
    part = e.mutation.part
    moved = Mutation(MovablePart((part.start + steps) % inst.n, part.length, part.block),
                     e.mutation.split, e.mutation.block)
    return GkmEdge(rotate(e.src, steps), rotate(e.dst, steps),
                   rho_shift_character(e.label, steps, inst.n), moved)


def export_graph(edges: Sequence[GkmEdge], inst: Instance, fmt: str = "dot") -> str:
    """
    Render the graph as a DOT digraph or as JSON with mutation metadata

    Every fixed point of the instance becomes a node, so isolated points
    are kept.
    """
    points = fixed_points(inst)
    position = {p: k for k, p in enumerate(points)}
    if fmt == "dot":
        lines = [f'digraph "{inst}" {{']
        lines.extend(f'  {k} [label="{format_point(p, inst)}"];' for k, p in enumerate(points))
        lines.extend(f'  {position[e.src]} -> {position[e.dst]} [label="{e.label}"];' for e in edges)
        lines.append("}")
        return "\n".join(lines) + "\n"
    if fmt == "json":
        data = {
            "instance": inst.to_json(),
            "points": [point_to_json(p, inst) for p in points],
            "edges": [
                {"src": position[e.src], "dst": position[e.dst],
                 "label": e.label.to_json(), "label_text": str(e.label),
                 "mutation": e.mutation.to_json()}
                for e in edges
            ],
        }
        return json.dumps(data, indent=2) + "\n"
    raise ValueError(f"unsupported graph format: {fmt}")


def parse_graph_json(text: str) -> Tuple[Instance, List[GkmEdge]]:
    """Inverse of export_graph(..., 'json')"""
    data = json.loads(text)
    inst = Instance.from_json(data["instance"])
    points = [
        validate_point(FixedPoint(tuple(Box(l, i) for l, i in item["boxes"])), inst)
        for item in data["points"]
    ]
    edges = [
        GkmEdge(points[item["src"]], points[item["dst"]],
                Character.from_json(item["label"], inst.n), Mutation.from_json(item["mutation"]))
        for item in data["edges"]
    ]
    return inst, edges
