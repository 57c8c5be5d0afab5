"""
Bialynicki-Birula cells and their closure poset

Over one movable part of y (start vertex g, length m) the cell is the set
of lines <u>, <Ju>, ..., <J^m u> with u = y(g) + sum of higher boxes.  Its
closure is the product over parts of the closures of these graphs, a
smooth toric variety.  A fixed point lies in it when its box over g + r
is J^r of a box no lower than y(g).  For one Jordan block this is the
coordinate-wise order; with several blocks the relation is not transitive
and cell dimensions need not drop along it.
"""

import json
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, List, Optional, Tuple

import networkx as nx
import numpy as np

from core.errors import InstanceError
from core.exactalg import Character
from core.fixpoints import (FixedPoint, MovablePart, fixed_points, fp_meet, format_point,
                            movable_parts, point_to_json)
from core.model import Box, Instance, count_greater, cweight, sorted_boxes, tweight
from utils.logger import setup_logger

logger = setup_logger(__name__)


def cell_dim(p: FixedPoint, inst: Instance) -> int:
    """Sum over movable parts of the number of boxes above the part's start box"""
    return sum(count_greater(p.box(part.start), inst) for part in movable_parts(p, inst))


def _pulled_back(s: FixedPoint, part: MovablePart) -> Optional[List[Box]]:
    """Boxes J^-r s(start + r) along the part, None when one leaves its row"""
    sequence = []
    for r in range(part.length + 1):
        b = s.box(part.start + r)
        if b.i - r < 1:
            return None
        sequence.append(Box(b.l, b.i - r))
    return sequence


def closure_contains(x: FixedPoint, s: FixedPoint, inst: Instance) -> bool:
    """
    Whether s lies in the closed cell of x

    Over each part of x the box of s at start + r must be J^r of a box no
    lower than x(start).  Without the J^r condition this is fp_leq, which
    is what remains for a single Jordan block.
    """
    for part in movable_parts(x, inst):
        floor = cweight(x.box(part.start), inst)
        sequence = _pulled_back(s, part)
        if sequence is None or any(cweight(b, inst) < floor for b in sequence):
            return False
    return True


@lru_cache(maxsize=4096)
def closed_cell_points(x: FixedPoint, inst: Instance) -> Tuple[FixedPoint, ...]:
    """Fixed points of the closed cell of x in canonical order"""
    return tuple(s for s in fixed_points(inst) if closure_contains(x, s, inst))


def _runs(sequence: List[Box]) -> List[Tuple[int, Box]]:
    """(first offset, box) for each maximal run of equal boxes"""
    runs: List[Tuple[int, Box]] = []
    for r, b in enumerate(sequence):
        if not runs or runs[-1][1] != b:
            runs.append((r, b))
    return runs


def _replace(z: FixedPoint, start: int, lo: int, hi: int, b: Box) -> FixedPoint:
    """Put J^r b over start + r for lo <= r <= hi"""
    boxes = list(z.boxes)
    for r in range(lo, hi + 1):
        boxes[(start + r) % z.n] = Box(b.l, b.i + r)
    return FixedPoint(tuple(boxes))


def cell_tangents(z: FixedPoint, y: FixedPoint, inst: Instance) -> List[Tuple[Character, FixedPoint]]:
    """
    Tangent weights of the closed cell of y at z, each with the fixed point
    at the far end of its T-curve

    Per part of y the pulled-back boxes of z split into runs c_1, ..., c_k.
    A box a no lower than y(g) outside the runs moves in against the last
    run starting at or before dist(a), with weight chi(a) - chi(c).
    Consecutive runs give chi(c_i) - chi(c_{i-1}), where c_i takes over the
    offsets of c_{i-1}.  chi is the T-weight over the part's start vertex.

    Raises:
        InstanceError: when z is not in the closed cell of y
    """
    if not closure_contains(y, z, inst):
        raise InstanceError(f"{format_point(z, inst)} is not in the closed cell of {format_point(y, inst)}")
    tangents: List[Tuple[Character, FixedPoint]] = []
    for part in movable_parts(y, inst):
        floor = cweight(y.box(part.start), inst)
        runs = _runs(_pulled_back(z, part))
        chain = {b for _, b in runs}

        def chi(b: Box) -> Character:
            return tweight(b, part.start, inst)

        for a in sorted_boxes(inst):
            if cweight(a, inst) < floor or a in chain:
                continue
            first, c = [run for run in runs if run[0] <= a.dist(inst)][-1]
            tangents.append((chi(a) - chi(c), _replace(z, part.start, first, a.dist(inst), a)))
        for (prev_first, prev), (first, c) in zip(runs, runs[1:]):
            tangents.append((chi(c) - chi(prev), _replace(z, part.start, prev_first, first - 1, c)))
    return tangents


@dataclass(frozen=True)
class CellPoset:
    """
    Closed cells and the fixed points they contain

    relation[a, b] is True when elements[b] lies in the closed cell of
    elements[a].  With several Jordan blocks this is not transitive; hasse
    reports the covers of the order it generates.
    """
    inst: Instance
    elements: Tuple[FixedPoint, ...]
    relation: np.ndarray = field(repr=False, compare=False)
    dims: Dict[FixedPoint, int] = field(repr=False, compare=False)

    positions: Dict[FixedPoint, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "positions", {p: k for k, p in enumerate(self.elements)})

    def index(self, p: FixedPoint) -> int:
        return self.positions[p]

    def below(self, x: FixedPoint) -> List[FixedPoint]:
        """Fixed points inside the closed cell of x"""
        row = self.relation[self.index(x)]
        return [self.elements[k] for k in np.flatnonzero(row)]

    def above(self, s: FixedPoint) -> List[FixedPoint]:
        """Fixed points whose closed cell contains s"""
        col = self.relation[:, self.index(s)]
        return [self.elements[k] for k in np.flatnonzero(col)]


@lru_cache(maxsize=64)
def build_poset(inst: Instance) -> CellPoset:
    points = fixed_points(inst)
    position = {p: k for k, p in enumerate(points)}
    relation = np.zeros((len(points), len(points)), dtype=bool)
    for a, x in enumerate(points):
        for s in closed_cell_points(x, inst):
            relation[a, position[s]] = True
    dims = {p: cell_dim(p, inst) for p in points}
    logger.info(f"{inst}: poset on {len(points)} cells, dim X = {max(dims.values())}")
    return CellPoset(inst, points, relation, dims)


def hasse(inst: Instance) -> List[Tuple[FixedPoint, FixedPoint]]:
    """
    Covering pairs (x, s) of the order generated by closed-cell membership

    Returns:
        Pairs sorted by the canonical positions of x and s
    """
    poset = build_poset(inst)
    graph = nx.DiGraph()
    graph.add_nodes_from(range(len(poset.elements)))
    rows, cols = np.nonzero(poset.relation)
    graph.add_edges_from((int(a), int(b)) for a, b in zip(rows, cols) if a != b)
    reduction = nx.transitive_reduction(graph)
    return [(poset.elements[a], poset.elements[b]) for a, b in sorted(reduction.edges())]


def poincare_polynomial(inst: Instance) -> List[int]:
    """Coefficient k counts the cells of dimension k"""
    counts = Counter(build_poset(inst).dims.values())
    return [counts.get(d, 0) for d in range(max(counts) + 1)]


def closed_cell_intersection(p: FixedPoint, q: FixedPoint, inst: Instance) -> FixedPoint:
    """Closed cells of one Jordan block intersect in the closed cell of the meet"""
    return fp_meet(p, q, inst)


def dimension_of_variety(inst: Instance) -> int:
    return max(build_poset(inst).dims.values())


def minimal_points(inst: Instance) -> List[FixedPoint]:
    """Fixed points in no other closed cell, i.e. those with open cells"""
    poset = build_poset(inst)
    counts = poset.relation.sum(axis=0)
    return [p for p, c in zip(poset.elements, counts) if c == 1]


def euler_characteristic(inst: Instance) -> int:
    return len(fixed_points(inst))


def dims_rows(inst: Instance) -> List[Dict[str, Any]]:
    poset = build_poset(inst)
    return [{"point": format_point(p, inst), "dim": poset.dims[p]} for p in poset.elements]


def poset_to_dot(inst: Instance) -> str:
    poset = build_poset(inst)
    lines = [f'digraph "{inst}" {{']
    for k, p in enumerate(poset.elements):
        lines.append(f'  {k} [label="{format_point(p, inst)}", dim={poset.dims[p]}];')
    for x, s in hasse(inst):
        lines.append(f"  {poset.index(x)} -> {poset.index(s)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def poset_to_json(inst: Instance) -> str:
    poset = build_poset(inst)
    data = {
        "instance": inst.to_json(),
        "points": [dict(point_to_json(p, inst), dim=poset.dims[p]) for p in poset.elements],
        "covers": [[poset.index(x), poset.index(s)] for x, s in hasse(inst)],
    }
    return json.dumps(data, indent=2) + "\n"
