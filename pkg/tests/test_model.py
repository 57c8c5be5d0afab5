"""Instances, boxes, weights and the twisted order."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.errors import InstanceError
from core.exactalg import T0, Character, VarId
from core.model import (Box, Instance, Ordering, box_compare, count_greater, cweight, jmap,
                        partitions, sorted_boxes, tweight)


def test_cweight_table():
    inst = Instance(3, (4, 3, 3, 2))
    assert cweight(Box(1, 4), inst) == 1
    assert cweight(Box(1, 3), inst) == -3
    assert cweight(Box(1, 1), inst) == -11
    assert cweight(Box(4, 2), inst) == 4
    assert cweight(Box(4, 1), inst) == 0
    assert cweight(Box(1, 1), Instance(1, (1,))) == 1


def test_cweight_injective():
    inst = Instance(3, (4, 3, 3, 2))
    weights = [cweight(b, inst) for b in inst.boxes()]
    assert len(set(weights)) == len(weights)


def test_tweight_examples(two_block):
    assert tweight(Box(1, 1), 0, two_block) == Character({VarId(1, 2): 1})
    assert tweight(Box(1, 2), 0, two_block) == Character({T0: 1, VarId(1, 1): 1})
    assert tweight(Box(1, 3), 0, two_block) == Character({T0: 2, VarId(1, 0): 1})
    assert tweight(Box(1, 1), 1, two_block) == Character({VarId(1, 0): 1})
    assert tweight(Box(2, 2), 1, two_block) == Character({T0: 1, VarId(2, 1): 1})
    assert tweight(Box(2, 1), 2, two_block) == Character({VarId(2, 0): 1})


def test_box_compare_examples():
    single = Instance(2, (3,))
    assert box_compare(Box(1, 1), Box(1, 2), single) == Ordering.LESS
    assert box_compare(Box(1, 3), Box(1, 2), single) == Ordering.GREATER
    equal = Instance(2, (3, 3))
    assert box_compare(Box(1, 3), Box(2, 3), equal) == Ordering.LESS
    assert box_compare(Box(2, 2), Box(2, 2), equal) == Ordering.EQUAL


def test_jmap():
    assert jmap(Box(1, 1), Instance(1, (3,))) == Box(1, 2)
    assert jmap(Box(1, 3), Instance(1, (3,))) is None
    assert jmap(Box(2, 1), Instance(1, (2, 1))) is None


def test_count_greater():
    assert count_greater(Box(1, 1), Instance(1, (3,))) == 2
    assert count_greater(Box(1, 3), Instance(1, (3,))) == 0
    assert count_greater(Box(4, 2), Instance(1, (4, 3, 3, 2))) == 0


def test_sorted_boxes_follow_jmap():
    inst = Instance(2, (3, 2, 2))
    order = sorted_boxes(inst)
    for b in inst.boxes():
        image = jmap(b, inst)
        if image is not None:
            assert order.index(b) < order.index(image)


@pytest.mark.parametrize("n,blocks,message", [
    (0, (3,), "n must be"),
    (3, (), "at least one"),
    (3, (2, 3), "non-increasing"),
    (3, (2, 0), ">= 1"),
])
def test_instance_validation(n, blocks, message):
    with pytest.raises(InstanceError, match=message):
        Instance(n, blocks)


def test_instance_parse_inline_and_file(tmp_path):
    assert Instance.parse("n=3;blocks=3,2") == Instance(3, (3, 2))
    path = tmp_path / "inst.json"
    path.write_text(json.dumps({"n": 4, "blocks": [2, 2, 1]}))
    assert Instance.parse(str(path)) == Instance(4, (2, 2, 1))
    assert str(Instance(4, (2, 2, 1))) == "n=4;blocks=2,2,1"
    with pytest.raises(InstanceError):
        Instance.parse("n=3")
    with pytest.raises(InstanceError):
        Instance.parse("n=x;blocks=3")


@pytest.mark.parametrize("data", [
    {"n": 3.7, "blocks": [3]},
    {"n": 3, "blocks": [3.7]},
    {"n": 3, "blocks": [3.0]},
    {"n": True, "blocks": [3]},
    {"n": 3, "blocks": [True]},
    {"n": "3", "blocks": [3]},
    {"n": 3, "blocks": "3"},
    {"n": 3},
    [3, [3]],
])
def test_instance_json_rejects_non_integers(data):
    with pytest.raises(InstanceError):
        Instance.from_json(data)


def test_instance_parse_rejects_directory(tmp_path):
    with pytest.raises(InstanceError, match="cannot read"):
        Instance.parse(str(tmp_path))


def test_box_validate(single3):
    assert Box(1, 3).validate(single3) == Box(1, 3)
    with pytest.raises(InstanceError):
        Box(1, 4).validate(single3)
    with pytest.raises(InstanceError):
        Box(2, 1).validate(single3)


def test_partitions():
    assert partitions(4) == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
    assert [len(partitions(k)) for k in range(1, 6)] == [1, 2, 3, 5, 7]


@pytest.mark.property_based
@given(st.lists(st.integers(1, 4), min_size=1, max_size=4), st.data())
@settings(max_examples=50, deadline=None)
def test_twisted_order_is_total_and_matches_weights(sizes, data):
    inst = Instance(2, tuple(sorted(sizes, reverse=True)))
    boxes = inst.boxes()
    a = data.draw(st.sampled_from(boxes))
    b = data.draw(st.sampled_from(boxes))
    c = data.draw(st.sampled_from(boxes))
    ab = box_compare(a, b, inst)
    assert ab == -box_compare(b, a, inst)
    assert (ab == Ordering.EQUAL) == (a == b)
    if ab == Ordering.LESS and box_compare(b, c, inst) == Ordering.LESS:
        assert box_compare(a, c, inst) == Ordering.LESS
    if a != b:
        assert (ab == Ordering.LESS) == (cweight(a, inst) < cweight(b, inst))
