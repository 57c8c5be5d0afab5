"""Brute-force oracles and their agreement with the fast paths."""

import math

import pytest

from config.settings import get_default_config
from conftest import small_instances
from core import verify
from core.cells import closed_cell_points
from core.cohomology import descending_order, dual_basis
from core.errors import BudgetExceededError
from core.exactalg import ONE, T0, ZERO, Character
from core.fixpoints import FixedPoint, ending_set, fixed_points
from core.gkm import euler_weights, gkm_graph
from core.model import Box, Instance
from core.verify import (OracleReport, check_abbv, check_graph_invariants, check_products,
                         check_tau_symmetry, compare_edges, compare_fixed_points,
                         evaluate_polynomial, evaluate_weight, expand_in_basis,
                         oracle_closed_cell, oracle_edge_weights, oracle_edges,
                         oracle_fixed_points, orbit_weight, run_suite, sample_points)

MAX_POINTS = get_default_config()["sweep"]["max_points"]
PRODUCT_PAIRS_POINTS = 27


def test_report_pass_flag():
    report = OracleReport("x")
    assert report.passed
    report.mismatch("item", 1, 2)
    assert not report.passed
    assert report.to_json()["mismatches"] == [{"item": "item", "expected": "1", "actual": "2"}]


def test_oracle_fixed_points_examples(single3):
    assert oracle_fixed_points(single3) == list(fixed_points(single3))
    assert len(oracle_fixed_points(Instance(3, (3, 2)))) == 23
    assert len(oracle_fixed_points(Instance(2, (1, 1)))) == 4
    assert oracle_fixed_points(Instance(1, (2,))) == [FixedPoint((Box(1, 2),))]


def test_oracle_budget_refusal(single3):
    with pytest.raises(BudgetExceededError) as info:
        oracle_fixed_points(single3, budget=26)
    assert info.value.required == 27
    assert info.value.budget == 26
    with pytest.raises(BudgetExceededError):
        oracle_edges(single3, budget=26)


def test_oracle_edges_flagship(single3):
    edges = oracle_edges(single3)
    assert len(edges) == 9
    assert edges == [(e.src, e.dst) for e in gkm_graph(single3)]
    weights = oracle_edge_weights(single3)
    for e in gkm_graph(single3):
        assert weights[(e.src, e.dst)] == e.label


def test_oracle_edges_trivial_cases(single3, subset):
    p = subset(0)
    assert orbit_weight(p, p, single3) is None
    assert oracle_edges(Instance(1, (2,))) == []


def test_orbit_needs_subrepresentation(single3, subset):
    # {0} and {1} differ on the whole cycle and are joined by no orbit
    assert orbit_weight(subset(0), subset(1), single3) is None
    assert orbit_weight(subset(0), subset(0, 1), single3) is not None


def test_compare_reports_pass(two_block):
    assert compare_fixed_points(two_block).passed
    report = compare_edges(two_block)
    assert report.passed, report.mismatches
    assert report.checked == len(gkm_graph(two_block))


def test_graph_invariants():
    for inst in (Instance(3, (3,)), Instance(1, (1,)), Instance(3, (2, 2, 1))):
        report = check_graph_invariants(inst)
        assert report.passed, report.mismatches


@pytest.mark.slow
def test_graph_invariants_larger_instance():
    assert check_graph_invariants(Instance(4, (3, 2))).passed


def test_abbv(single3):
    report = check_abbv(single3)
    assert report.passed
    assert report.checked == 49
    assert check_abbv(Instance(2, (2,))).passed


def test_abbv_detects_tampered_euler_class(single3, subset):
    target = subset(0)

    def tampered(z, y, inst):
        weights = euler_weights(z, y, inst)
        if z == target and y == target:
            weights[0] = -weights[0]
        return weights

    report = check_abbv(single3, weights_fn=tampered)
    assert not report.passed
    assert any(item.startswith("I={0} over I={0}") for item, _, _ in report.mismatches)


def test_abbv_detects_tampered_restriction(single3, subset):
    basis = dual_basis(single3)
    x = subset(0, 2)
    basis[x] = basis[x].replace(subset(2), ZERO)
    assert not check_abbv(single3, classes=basis).passed


@pytest.mark.parametrize("inst", [Instance(2, (2, 1)), Instance(3, (3, 2)), Instance(2, (2, 1, 1))], ids=str)
def test_abbv_multi_block(inst):
    report = check_abbv(inst)
    assert report.passed, report.mismatches[:3]
    assert report.checked == len(fixed_points(inst)) ** 2


def test_closed_cell_equations_match_engine():
    for inst in (Instance(2, (2, 1)), Instance(3, (3, 2)), Instance(3, (2, 2, 1))):
        points = fixed_points(inst)
        for y in points:
            assert oracle_closed_cell(y, points, inst) == list(closed_cell_points(y, inst))


def test_abbv_reports_engine_weights_that_disagree(monkeypatch, single3, subset):
    def shifted(z, y, inst):
        weights = euler_weights(z, y, inst)
        if z == subset(0, 1, 2) and weights:
            weights[-1] = weights[-1] + Character({T0: 1})
        return weights

    monkeypatch.setattr(verify, "euler_weights", shifted)
    report = check_abbv(single3)
    assert any(item.startswith("tangent weights at I={0,1,2}") for item, _, _ in report.mismatches)


def test_sample_points_avoid_zero_weights(two_block):
    incident = oracle_edge_weights(two_block)
    for at in sample_points(two_block):
        assert at[T0] < 1
        for weight in incident.values():
            assert evaluate_weight(weight, at) != 0
    x = fixed_points(two_block)[0]
    c = dual_basis(two_block)[x]
    at = sample_points(two_block)[0]
    expected = math.prod(evaluate_weight(w, at) for w in euler_weights(x, x, two_block))
    assert evaluate_polynomial(c(x), at) == expected


def test_expand_in_basis(single3, subset):
    basis = dual_basis(single3)
    product = basis[subset(0, 1)] * basis[subset(0, 2)]
    assert expand_in_basis(product, single3) == {subset(0): ONE}


def test_products_and_tau(single3):
    assert check_products(single3).passed
    assert check_tau_symmetry(single3).passed


def test_run_suite(single3):
    reports = run_suite(single3, "all")
    assert [r.suite for r in reports] == ["fixpoints", "edges", "graph", "abbv", "basis", "tau", "products"]
    assert all(r.passed for r in reports)
    with pytest.raises(ValueError):
        run_suite(single3, "nope")


@pytest.mark.slow
def test_oracle_equivalence_all_small_instances():
    for inst in small_instances():
        assert compare_fixed_points(inst).passed, str(inst)
        report = compare_edges(inst)
        assert report.passed, (str(inst), report.mismatches[:3])
        assert check_graph_invariants(inst).passed, str(inst)


def test_single_block_graphs_isomorphic(single3):
    reference = {(ending_set(e.src, single3), ending_set(e.dst, single3)) for e in gkm_graph(single3)}
    for size in (4, 5, 6):
        inst = Instance(3, (size,))
        found = {(ending_set(e.src, inst), ending_set(e.dst, inst)) for e in gkm_graph(inst)}
        assert found == reference


def _within_budget():
    return [inst for inst in small_instances() if len(fixed_points(inst)) <= MAX_POINTS]


@pytest.mark.slow
@pytest.mark.parametrize("inst", _within_budget(), ids=str)
def test_abbv_and_tau_all_small_instances(inst):
    report = check_abbv(inst)
    assert report.passed, report.mismatches[:3]
    report = check_tau_symmetry(inst)
    assert report.passed, report.mismatches[:3]


@pytest.mark.slow
@pytest.mark.parametrize("inst", _within_budget(), ids=str)
def test_products_all_small_instances(inst):
    points = descending_order(fixed_points(inst), inst)
    if len(points) <= PRODUCT_PAIRS_POINTS:
        pairs = None
    else:
        pairs = [(x, y) for x in points for y in points[-3:]]
    report = check_products(inst, pairs)
    assert report.passed, report.mismatches[:3]
