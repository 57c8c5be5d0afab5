"""
Brute-force oracles for gkmquiver

The oracles here avoid the mutation rules: fixed points
are found by trying every box assignment and edges by testing the
one-dimensional torus orbit through every pair of fixed points.  Closed
cells are cut out by their incidence equations, and localization sums
are evaluated in exact rationals at sample points.
"""

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from config.settings import get_default_config
from core.cells import cell_dim, cell_tangents, closed_cell_points
from core.cohomology import (EqClass, descending_order, dual_basis, structure_constants,
                             tau_act, verify_kt_basis)
from core.errors import BudgetExceededError, ComputationError, NotDivisibleError
from core.exactalg import T0, Character, Polynomial, VarId, chi_pair, divide_by_weights
from core.fixpoints import (FixedPoint, canonical_key, enumerate_fixed_points, fixed_points,
                            format_point, is_successor_closed, movable_parts)
from core.gkm import build_graph, euler_weights, gkm_graph, rotate, rotate_edge
from core.model import Box, Instance, cweight, jmap, tweight
from utils.helpers import timed
from utils.logger import setup_logger

logger = setup_logger(__name__)

DEFAULT_BUDGET = get_default_config()["oracle"]["budget"]
SUITES = ("fixpoints", "edges", "graph", "abbv", "basis", "tau", "products")

WeightsFn = Callable[[FixedPoint, FixedPoint, Instance], List[Character]]


@dataclass
class OracleReport:
    suite: str
    checked: int = 0
    mismatches: List[Tuple[str, str, str]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def mismatch(self, item: str, expected: Any, actual: Any) -> None:
        self.mismatches.append((item, str(expected), str(actual)))

    def to_json(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "checked": self.checked,
            "passed": self.passed,
            "mismatches": [
                {"item": item, "expected": expected, "actual": actual}
                for item, expected, actual in sorted(self.mismatches)
            ],
        }


def _require_budget(what: str, required: int, budget: int) -> None:
    if required > budget:
        logger.warning(f"{what}: refusing {required} candidates (budget {budget})")
        raise BudgetExceededError(what, required, budget)


@timed("oracle_fixed_points")
def oracle_fixed_points(inst: Instance, budget: int = DEFAULT_BUDGET) -> List[FixedPoint]:
    """
    All successor-closed box assignments, found by trying all N^n of them

    Raises:
        BudgetExceededError: when N^n exceeds the budget
    """
    _require_budget("oracle_fixed_points", inst.N ** inst.n, budget)
    found = [
        p for p in (FixedPoint(boxes) for boxes in product(inst.boxes(), repeat=inst.n))
        if is_successor_closed(p, inst)
    ]
    return sorted(found, key=lambda p: canonical_key(p, inst))


def _orbit_vector(p: FixedPoint, q: FixedPoint, v: int) -> Dict[Box, int]:
    """Generic vector e_p + e_q over vertex v (e_p where the points agree)"""
    vec = {p.box(v): 1}
    vec[q.box(v)] = 1
    return vec


def _apply_j(vec: Mapping[Box, int], inst: Instance) -> Dict[Box, int]:
    out: Dict[Box, int] = {}
    for b, c in vec.items():
        image = jmap(b, inst)
        if image is not None:
            out[image] = out.get(image, 0) + c
    return {b: c for b, c in out.items() if c}


def _in_span(vec: Mapping[Box, int], line: Mapping[Box, int]) -> bool:
    if not vec:
        return True
    if vec.keys() != line.keys():
        return False
    first = next(iter(line))
    ratio = Fraction(vec[first], line[first])
    return all(vec[b] == ratio * line[b] for b in line)


def orbit_weight(p: FixedPoint, q: FixedPoint, inst: Instance) -> Optional[Character]:
    """
    Direction of the T-orbit joining p and q, or None when there is none

    The orbit exists when the generic combination of p and q is a
    subrepresentation and all weight differences lie on one ray.  The
    result is tweight(q) - tweight(p) at the first vertex where they differ.
    """
    differing = [v for v in range(inst.n) if p.box(v) != q.box(v)]
    if not differing:
        return None
    for v in range(inst.n):
        image = _apply_j(_orbit_vector(p, q, v), inst)
        if not _in_span(image, _orbit_vector(p, q, v + 1)):
            return None
    diffs = [tweight(q.box(v), v, inst) - tweight(p.box(v), v, inst) for v in differing]
    for d in diffs[1:]:
        ratio = d.ratio_to(diffs[0])
        if ratio is None or ratio <= 0:
            return None
    return diffs[0]


def oracle_edge_weights(inst: Instance, budget: int = DEFAULT_BUDGET) -> Dict[Tuple[FixedPoint, FixedPoint], Character]:
    """
    Oriented orbit edges with the tangent weight at the target

    An accepted pair is oriented from the endpoint whose weight difference
    pairs positively with the cocharacter.

    Raises:
        BudgetExceededError: when the number of pairs exceeds the budget
    """
    points = oracle_fixed_points(inst, budget)
    _require_budget("oracle_edges", len(points) * (len(points) - 1) // 2, budget)
    found: Dict[Tuple[FixedPoint, FixedPoint], Character] = {}
    for p, q in combinations(points, 2):
        d = orbit_weight(p, q, inst)
        if d is None:
            continue
        if chi_pair(d, inst) > 0:
            found[(p, q)] = -d
        else:
            found[(q, p)] = d
    return found


def oracle_edges(inst: Instance, budget: int = DEFAULT_BUDGET) -> List[Tuple[FixedPoint, FixedPoint]]:
    position = {p: k for k, p in enumerate(fixed_points(inst))}
    return sorted(oracle_edge_weights(inst, budget), key=lambda e: (position[e[0]], position[e[1]]))


def compare_fixed_points(inst: Instance, budget: int = DEFAULT_BUDGET) -> OracleReport:
    report = OracleReport("fixpoints")
    fast = enumerate_fixed_points(inst)
    slow = oracle_fixed_points(inst, budget)
    report.checked = len(set(fast) | set(slow))
    for p in set(slow) - set(fast):
        report.mismatch(format_point(p, inst), "enumerated", "missing")
    for p in set(fast) - set(slow):
        report.mismatch(format_point(p, inst), "absent", "enumerated")
    if fast != slow and not report.mismatches:
        report.mismatch("order", "canonical", "different")
    return report


def compare_edges(inst: Instance, budget: int = DEFAULT_BUDGET) -> OracleReport:
    report = OracleReport("edges")
    slow = oracle_edge_weights(inst, budget)
    fast = {(e.src, e.dst): e.label for e in gkm_graph(inst)}
    report.checked = len(set(fast) | set(slow))
    for (p, q), weight in slow.items():
        name = f"{format_point(p, inst)} -> {format_point(q, inst)}"
        if (p, q) not in fast:
            report.mismatch(name, "edge", "missing")
            continue
        ratio = fast[(p, q)].ratio_to(weight)
        if ratio is None or ratio <= 0:
            report.mismatch(name, weight, fast[(p, q)])
    for (p, q) in set(fast) - set(slow):
        report.mismatch(f"{format_point(p, inst)} -> {format_point(q, inst)}", "no edge", "edge")
    return report


def _satisfies_cell_equations(y: FixedPoint, vectors: Sequence[Mapping[Box, int]], inst: Instance) -> bool:
    """
    Whether the lines spanned by vectors (one per vertex) meet the incidence
    equations of the closed cell of y

    Over a part of y the line at start + r, pulled back by J^-r, must live
    on boxes no lower than y(start), and for r < r' the part of the r-th
    pulled-back vector on boxes with dist >= r' must lie on the r'-th line.
    """
    for part in movable_parts(y, inst):
        floor = cweight(y.box(part.start), inst)
        lines: List[Dict[Box, int]] = []
        for r in range(part.length + 1):
            line = {}
            for b, c in vectors[(part.start + r) % inst.n].items():
                source = Box(b.l, b.i - r)
                if source.i < 1 or cweight(source, inst) < floor:
                    return False
                line[source] = c
            lines.append(line)
        for r, later in combinations(range(len(lines)), 2):
            projected = {b: c for b, c in lines[r].items() if b.dist(inst) >= later}
            if not _in_span(projected, lines[later]):
                return False
    return True


def oracle_closed_cell(y: FixedPoint, points: Sequence[FixedPoint], inst: Instance) -> List[FixedPoint]:
    return [z for z in points
            if _satisfies_cell_equations(y, [{z.box(v): 1} for v in range(inst.n)], inst)]


def _incident_weights(edges: Mapping[Tuple[FixedPoint, FixedPoint], Character]
                      ) -> Dict[FixedPoint, List[Tuple[FixedPoint, Character]]]:
    """Orbit neighbours of each point with the tangent weight there"""
    incident: Dict[FixedPoint, List[Tuple[FixedPoint, Character]]] = {}
    for (src, dst), weight in edges.items():
        incident.setdefault(dst, []).append((src, weight))
        incident.setdefault(src, []).append((dst, -weight))
    return incident


def oracle_euler_weights(z: FixedPoint, y: FixedPoint,
                         incident: Mapping[FixedPoint, List[Tuple[FixedPoint, Character]]],
                         inst: Instance) -> List[Character]:
    """Weights at z of the orbits through z whose generic point is in the closed cell of y"""
    return [
        weight for other, weight in incident.get(z, [])
        if _satisfies_cell_equations(y, [_orbit_vector(z, other, v) for v in range(inst.n)], inst)
    ]


def sample_points(inst: Instance, count: int = 3) -> List[Dict[VarId, Fraction]]:
    """
    Rational points where no weight a*t0 + t[r][s] - t[r'][s'] vanishes

    Distinct integers go to the t[r][s] and a small fraction to t0.
    """
    variables = [var for var in inst.variables() if not var.is_t0]
    return [
        {T0: Fraction(1, 1000 + sample), **{var: Fraction(k * (sample + 2) + 1)
                                             for k, var in enumerate(variables)}}
        for sample in range(count)
    ]


def evaluate_polynomial(f: Polynomial, at: Mapping[VarId, Fraction]) -> Fraction:
    total = Fraction(0)
    for monomial, coeff in f.items():
        term = Fraction(coeff)
        for var, exponent in monomial:
            term *= at[var] ** exponent
        total += term
    return total


def evaluate_weight(w: Character, at: Mapping[VarId, Fraction]) -> Fraction:
    return sum((c * at[var] for var, c in w.items()), Fraction(0))


def check_abbv(inst: Instance, weights_fn: Optional[WeightsFn] = None,
               classes: Optional[Mapping[FixedPoint, EqClass]] = None,
               budget: int = DEFAULT_BUDGET) -> OracleReport:
    """
    Evaluate every integral of p^x over a closed cell and compare with delta

    Closed cells come from their incidence equations and tangent weights
    from the brute-force orbit edges; each localization sum is evaluated
    in exact rationals at a few sample points.  Cells and weights that
    differ from the engine's are reported as well.

    Args:
        inst: Instance to check
        weights_fn: Replaces the orbit weights in the sums (fault injection)
        classes: Classes to integrate (defaults to the dual basis)
        budget: Candidate limit for the orbit edge search

    Returns:
        Report over all |X^T|^2 integrals

    Raises:
        BudgetExceededError: when the orbit search refuses the instance
    """
    report = OracleReport("abbv")
    basis = classes if classes is not None else dual_basis(inst)
    points = fixed_points(inst)
    incident = _incident_weights(oracle_edge_weights(inst, budget))
    samples = sample_points(inst)

    cells: Dict[FixedPoint, List[FixedPoint]] = {}
    weights: Dict[Tuple[FixedPoint, FixedPoint], List[Character]] = {}
    for y in points:
        cells[y] = oracle_closed_cell(y, points, inst)
        if set(cells[y]) != set(closed_cell_points(y, inst)):
            report.mismatch(f"closed cell {format_point(y, inst)}", len(cells[y]),
                            len(closed_cell_points(y, inst)))
            continue
        for z in cells[y]:
            found = oracle_euler_weights(z, y, incident, inst)
            engine = euler_weights(z, y, inst)
            if Counter(map(str, found)) != Counter(map(str, engine)):
                report.mismatch(f"tangent weights at {format_point(z, inst)} in {format_point(y, inst)}",
                                sorted(map(str, found)), sorted(map(str, engine)))
            weights[(z, y)] = weights_fn(z, y, inst) if weights_fn is not None else found

    for x, c in basis.items():
        for y in points:
            report.checked += 1
            name = f"{format_point(x, inst)} over {format_point(y, inst)}"
            expected = 1 if x == y else 0
            try:
                values = [
                    sum((evaluate_polynomial(c(z), at)
                         / math.prod(evaluate_weight(w, at) for w in weights[(z, y)])
                         for z in cells[y] if not c(z).is_zero), Fraction(0))
                    for at in samples
                ]
            except KeyError:
                report.mismatch(name, "closed cell", "unavailable")
                continue
            except ZeroDivisionError as e:
                report.mismatch(name, "finite", e)
                continue
            wrong = [v for v in values if v != expected]
            if wrong:
                report.mismatch(name, expected, wrong[0])
    return report


def check_graph_invariants(inst: Instance) -> OracleReport:
    """
    Degrees, tangent curves of closed cells, reachability and label independence

    Every tangent weight of a closed cell at one of its points must be the
    weight of a graph edge joining that point to the curve's far end.
    """
    report = OracleReport("graph")
    graph = build_graph(inst)
    points = fixed_points(inst)
    digraph = nx.DiGraph()
    digraph.add_nodes_from(points)
    digraph.add_edges_from((e.src, e.dst) for e in graph.edges)
    weight_at = {}
    for e in graph.edges:
        weight_at[(e.dst, e.src)] = e.label
        weight_at[(e.src, e.dst)] = -e.label

    for p in points:
        report.checked += 1
        name = format_point(p, inst)
        dim = cell_dim(p, inst)
        if graph.out_degree(p) != dim:
            report.mismatch(f"out-degree {name}", dim, graph.out_degree(p))

        reachable = nx.descendants(digraph, p) | {p}
        for s in closed_cell_points(p, inst):
            if s not in reachable:
                report.mismatch(f"closed cell {name} at {format_point(s, inst)}", "reachable", "no path")
            tangents = cell_tangents(s, p, inst)
            if len(tangents) != dim:
                report.mismatch(f"tangents of {name} at {format_point(s, inst)}", dim, len(tangents))
            for weight, end in tangents:
                if weight_at.get((s, end)) != weight:
                    report.mismatch(f"curve {format_point(s, inst)} -> {format_point(end, inst)} in {name}",
                                    weight, weight_at.get((s, end), "no edge"))

        labels = [e.label for e in graph.outgoing[p]] + [e.label for e in graph.incoming[p]]
        for a, b in combinations(labels, 2):
            if a.ratio_to(b) is not None:
                report.mismatch(f"labels at {name}", "independent", f"{a} ~ {b}")
    return report


def check_basis(inst: Instance) -> OracleReport:
    report = OracleReport("basis")
    kt = verify_kt_basis(dual_basis(inst), inst, check_duality=False)
    report.checked = kt.checked
    for failure in kt.failures:
        report.mismatch(f"{failure['condition']} {failure['point']}", "holds", failure["detail"])
    return report


def check_tau_symmetry(inst: Instance) -> OracleReport:
    """p^{tau x} = tau(p^x) and the edge set is closed under rotation"""
    report = OracleReport("tau")
    basis = dual_basis(inst)
    edges = set(gkm_graph(inst))
    for steps in range(1, inst.n):
        for x, c in basis.items():
            report.checked += 1
            rotated = rotate(x, steps)
            if basis[rotated] != tau_act(c, steps):
                report.mismatch(f"tau^{steps} p^{format_point(x, inst)}", format_point(rotated, inst), "differs")
        for e in edges:
            report.checked += 1
            if rotate_edge(e, steps, inst) not in edges:
                report.mismatch(f"tau^{steps} edge {format_point(e.src, inst)} -> {format_point(e.dst, inst)}",
                                "edge", "missing")
    return report


def expand_in_basis(c: EqClass, inst: Instance) -> Dict[FixedPoint, Polynomial]:
    """
    Coefficients a_z with c = sum_z a_z p^z, by triangular elimination

    Raises:
        ComputationError: if c is not a polynomial combination of the basis
    """
    basis = dual_basis(inst)
    coeffs: Dict[FixedPoint, Polynomial] = {}
    for s in descending_order(fixed_points(inst), inst):
        residual = c(s)
        for z, a in coeffs.items():
            residual = residual - a * basis[z](s)
        if residual.is_zero:
            continue
        try:
            coeffs[s] = divide_by_weights(residual, euler_weights(s, s, inst))
        except NotDivisibleError as e:
            logger.error(f"expansion stuck at {format_point(s, inst)}: {e}")
            raise ComputationError(f"class is not in the span of the basis at {format_point(s, inst)}") from e
    position = {p: k for k, p in enumerate(fixed_points(inst))}
    return dict(sorted(coeffs.items(), key=lambda kv: position[kv[0]]))


def check_products(inst: Instance, pairs: Optional[Sequence[Tuple[FixedPoint, FixedPoint]]] = None) -> OracleReport:
    """Structure constants against re-expansion of the pointwise product"""
    report = OracleReport("products")
    basis = dual_basis(inst)
    points = fixed_points(inst)
    if pairs is None:
        pairs = [(x, y) for k, x in enumerate(points) for y in points[k:]]
    for x, y in pairs:
        report.checked += 1
        name = f"p^{format_point(x, inst)} * p^{format_point(y, inst)}"
        expected = expand_in_basis(basis[x] * basis[y], inst)
        actual = structure_constants(x, y, inst)
        if expected != actual:
            report.mismatch(name, _format_expansion(expected, inst), _format_expansion(actual, inst))
    return report


def _format_expansion(coeffs: Mapping[FixedPoint, Polynomial], inst: Instance) -> str:
    return "; ".join(f"{format_point(z, inst)}: {c}" for z, c in coeffs.items())


def run_suite(inst: Instance, suite: str = "all", budget: int = DEFAULT_BUDGET) -> List[OracleReport]:
    """
    Run one named suite, or every suite for 'all'

    Raises:
        ValueError: for an unknown suite name
        BudgetExceededError: when an oracle refuses the instance
    """
    runners: Dict[str, Callable[[], OracleReport]] = {
        "fixpoints": lambda: compare_fixed_points(inst, budget),
        "edges": lambda: compare_edges(inst, budget),
        "graph": lambda: check_graph_invariants(inst),
        "abbv": lambda: check_abbv(inst, budget=budget),
        "basis": lambda: check_basis(inst),
        "tau": lambda: check_tau_symmetry(inst),
        "products": lambda: check_products(inst),
    }
    if suite != "all" and suite not in runners:
        raise ValueError(f"unknown suite {suite!r}, expected one of {', '.join(SUITES)} or all")
    names = SUITES if suite == "all" else (suite,)
    reports = []
    for name in names:
        report = runners[name]()
        if not report.passed:
            logger.warning(f"{inst}: suite {name} found {len(report.mismatches)} mismatches")
        reports.append(report)
    return reports
