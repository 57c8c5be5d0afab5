"""BB cell dimensions and the closure poset."""

import json

import numpy as np
import pytest

from conftest import small_instances
from core.cells import (build_poset, cell_dim, cell_tangents, closed_cell_intersection,
                        closed_cell_points, closure_contains, dimension_of_variety, dims_rows,
                        euler_characteristic, hasse, minimal_points, poincare_polynomial,
                        poset_to_dot, poset_to_json)
from core.fixpoints import (FixedPoint, ending_set, fixed_points, fp_leq, parse_point,
                            point_weights)
from core.model import Box, Instance

SINGLE_BLOCK = [Instance(n, (size,)) for n in range(1, 6) for size in range(1, 6)]


def test_flagship_dims(single3):
    for p in fixed_points(single3):
        assert cell_dim(p, single3) == 3 - len(ending_set(p, single3))
    assert poincare_polynomial(single3) == [1, 3, 3]
    assert dimension_of_variety(single3) == 2
    assert euler_characteristic(single3) == 7


def test_dims_rows(single3):
    rows = dims_rows(single3)
    assert rows[0] == {"point": "I={0}", "dim": 2}
    assert rows[2] == {"point": "I={0,1,2}", "dim": 0}


def test_poincare_sums_to_euler_characteristic(two_block):
    assert sum(poincare_polynomial(two_block)) == 23


def test_closure_relation(single3, subset):
    assert closure_contains(subset(0), subset(0, 1), single3)
    assert not closure_contains(subset(0, 1), subset(0), single3)
    poset = build_poset(single3)
    assert poset.relation.dtype == np.bool_
    assert set(poset.below(subset(0))) == {subset(0), subset(0, 1), subset(0, 2), subset(0, 1, 2)}
    assert set(poset.above(subset(0, 1))) == {subset(0), subset(1), subset(0, 1)}


def test_hasse(single3, subset):
    covers = hasse(single3)
    assert len(covers) == 9
    expected = set()
    for x in fixed_points(single3):
        ends = set(ending_set(x, single3))
        for a in set(range(3)) - ends:
            expected.add((x, subset(*(ends | {a}))))
    assert set(covers) == expected


def test_closure_raises_every_weight(two_block):
    points = fixed_points(two_block)
    for x in points:
        for s in closed_cell_points(x, two_block):
            assert fp_leq(x, s, two_block)
            if s != x:
                assert sum(point_weights(s, two_block)) > sum(point_weights(x, two_block))


def test_multi_block_closed_cell():
    inst = Instance(2, (2, 1))
    x = parse_point("boxes=1.2,1.1", inst)
    cell = closed_cell_points(x, inst)
    assert set(cell) == {x, parse_point("boxes=1.2,1.2", inst), parse_point("boxes=1.2,2.1", inst)}
    assert all(s.box(0) == Box(1, 2) for s in cell)
    assert len(cell_tangents(x, x, inst)) == cell_dim(x, inst) == 2


def test_closure_not_transitive_with_several_blocks():
    inst = Instance(2, (2, 1))
    x = parse_point("boxes=1.2,1.1", inst)
    s = parse_point("boxes=1.2,1.2", inst)
    far = parse_point("boxes=2.1,2.1", inst)
    assert closure_contains(x, s, inst)
    assert closure_contains(s, far, inst)
    assert not closure_contains(x, far, inst)
    assert cell_dim(s, inst) == cell_dim(x, inst)
    assert (x, s) in hasse(inst)


def test_cell_dims_not_monotone_with_several_blocks():
    inst = Instance(2, (2, 1, 1))
    x = parse_point("boxes=1.2,1.1", inst)
    s = parse_point("boxes=1.2,1.2", inst)
    assert closure_contains(x, s, inst)
    assert cell_dim(x, inst) == 3
    assert cell_dim(s, inst) == 4


@pytest.mark.parametrize("inst", small_instances(), ids=str)
def test_single_zero_dimensional_cell(inst):
    zero = [p for p in fixed_points(inst) if cell_dim(p, inst) == 0]
    bottom = Box(inst.M, inst.block_size(inst.M))
    assert zero == [FixedPoint((bottom,) * inst.n)]


@pytest.mark.parametrize("inst", SINGLE_BLOCK, ids=str)
def test_single_block_cells(inst):
    points = fixed_points(inst)
    for p in points:
        assert cell_dim(p, inst) == inst.n - len(ending_set(p, inst))
    for x in points:
        cell = set(closed_cell_points(x, inst))
        assert cell == {s for s in points if fp_leq(x, s, inst)}
        for s in cell - {x}:
            assert cell_dim(x, inst) > cell_dim(s, inst)


@pytest.mark.parametrize("inst", SINGLE_BLOCK, ids=str)
def test_intersection_of_closed_cells(inst):
    points = fixed_points(inst)
    for p in points:
        for q in points:
            meet = closed_cell_intersection(p, q, inst)
            both = set(closed_cell_points(p, inst)) & set(closed_cell_points(q, inst))
            assert set(closed_cell_points(meet, inst)) == both


@pytest.mark.slow
@pytest.mark.parametrize("inst", small_instances(), ids=str)
def test_closure_weight_monotone_all_small_instances(inst):
    for x in fixed_points(inst):
        weight = sum(point_weights(x, inst))
        cell = closed_cell_points(x, inst)
        assert x in cell
        for s in cell:
            assert fp_leq(x, s, inst)
            if s != x:
                assert sum(point_weights(s, inst)) > weight
            if inst.M == 1 and s != x:
                assert cell_dim(s, inst) < cell_dim(x, inst)


def test_minimal_points(single3, subset):
    assert set(minimal_points(single3)) == {subset(0), subset(1), subset(2)}


def test_closed_cell_intersection(single3, subset):
    assert closed_cell_intersection(subset(0), subset(1), single3) == subset(0, 1)
    with pytest.raises(ValueError):
        closed_cell_intersection(fixed_points(Instance(2, (1, 1)))[0],
                                 fixed_points(Instance(2, (1, 1)))[1], Instance(2, (1, 1)))


def test_poset_exports(single3):
    dot = poset_to_dot(single3)
    assert dot.startswith('digraph "n=3;blocks=3" {')
    assert dot.count("->") == 9
    data = json.loads(poset_to_json(single3))
    assert len(data["points"]) == 7
    assert data["points"][0]["I"] == [0]
    assert len(data["covers"]) == 9
