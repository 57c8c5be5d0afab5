"""
Equivariant cohomology through localization

Classes are recorded by their restrictions to fixed points.  The basis
dual to the closed-cell fundamental classes is solved for one fixed point
at a time, by decreasing C*-weight sum, with the Atiyah-Bott/Berline-Vergne
sum over each closed cell as the equation.
"""

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Mapping, Optional

import networkx as nx

from core.cells import cell_dim, closed_cell_points
from core.errors import ComputationError, NotDivisibleError
from core.exactalg import (ONE, ZERO, Polynomial, RationalFunction, exact_div_linear,
                           product, rat_sum, rho_shift)
from core.fixpoints import FixedPoint, fixed_points, format_point, point_weights
from core.gkm import build_graph, euler_weights, rotate
from core.model import Instance
from utils.logger import setup_logger

logger = setup_logger(__name__)


@dataclass(frozen=True)
class EqClass:
    """A class given by its restriction to every fixed point"""
    inst: Instance
    restrictions: Mapping[FixedPoint, Polynomial] = field(compare=False)

    def __post_init__(self):
        full = {p: self.restrictions.get(p, ZERO) for p in fixed_points(self.inst)}
        object.__setattr__(self, "restrictions", full)

    def __call__(self, p: FixedPoint) -> Polynomial:
        return self.restrictions[p]

    def support(self) -> List[FixedPoint]:
        return [p for p, f in self.restrictions.items() if not f.is_zero]

    def degree(self) -> int:
        """Common degree of the nonzero restrictions, -1 for the zero class"""
        degrees = {f.degree() for f in self.restrictions.values() if not f.is_zero}
        if len(degrees) > 1:
            raise ComputationError(f"class mixes degrees {sorted(degrees)}")
        return degrees.pop() if degrees else -1

    def __mul__(self, other: "EqClass") -> "EqClass":
        return EqClass(self.inst, {p: f * other(p) for p, f in self.restrictions.items()})

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, EqClass) and self.inst == other.inst
                and self.restrictions == other.restrictions)

    __hash__ = None

    def replace(self, p: FixedPoint, value: Polynomial) -> "EqClass":
        return EqClass(self.inst, {**self.restrictions, p: value})


def identity_class(inst: Instance) -> EqClass:
    return EqClass(inst, {p: ONE for p in fixed_points(inst)})


def descending_order(points: Iterable[FixedPoint], inst: Instance) -> List[FixedPoint]:
    """Linear extension of the fixed-point order, largest points first"""
    return sorted(points, key=lambda p: -sum(point_weights(p, inst)))


def integrate(c: EqClass, y: FixedPoint, inst: Instance) -> RationalFunction:
    """Integral of c over the closed cell of y, as a localization sum"""
    return rat_sum(
        RationalFunction.from_weights(c(z), euler_weights(z, y, inst))
        for z in closed_cell_points(y, inst)
        if not c(z).is_zero
    )


def dual_basis_class(x: FixedPoint, inst: Instance) -> EqClass:
    """
    The class p^x with integral delta_{x,y} over every closed cell

    Points are visited by decreasing C*-weight sum, which strictly increases
    from y to every other point of its closed cell.  So p^x vanishes before
    x, and at each later y the integral over the closed cell of y fixes p^x(y).

    Raises:
        ComputationError: if some restriction fails to be a polynomial
    """
    order = descending_order(fixed_points(inst), inst)
    values: Dict[FixedPoint, Polynomial] = {x: product(euler_weights(x, x, inst))}
    for y in order[order.index(x) + 1:]:
        terms = [
            RationalFunction.from_weights(values[s], euler_weights(s, y, inst))
            for s in closed_cell_points(y, inst)
            if s in values
        ]
        if not terms:
            continue
        scaled = rat_sum(terms) * RationalFunction.from_polynomial(-product(euler_weights(y, y, inst)))
        try:
            value = scaled.to_polynomial()
        except NotDivisibleError as e:
            logger.error(f"dual class of {format_point(x, inst)} at {format_point(y, inst)}: {e}")
            raise ComputationError(f"non-polynomial restriction of p^{format_point(x, inst)}") from e
        if not value.is_zero:
            values[y] = value
    return EqClass(inst, values)


@lru_cache(maxsize=16)
def _dual_basis(inst: Instance) -> Dict[FixedPoint, EqClass]:
    basis = {x: dual_basis_class(x, inst) for x in fixed_points(inst)}
    logger.info(f"{inst}: dual basis of {len(basis)} classes computed")
    return basis


def dual_basis(inst: Instance) -> Dict[FixedPoint, EqClass]:
    return dict(_dual_basis(inst))


def gkm_compatible(c: EqClass, inst: Instance) -> List[str]:
    """Edges across which the restrictions do not differ by a multiple of the label"""
    failures = []
    for e in build_graph(inst).edges:
        try:
            exact_div_linear(c(e.src) - c(e.dst), e.label)
        except NotDivisibleError:
            failures.append(f"{format_point(e.src, inst)} -> {format_point(e.dst, inst)}")
    return failures


@dataclass
class KtReport:
    """Per-class, per-condition outcome of the Knutson-Tao checks"""
    checked: int = 0
    failures: List[Dict[str, Any]] = field(default_factory=list)
    unique: bool = False

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, point: str, condition: str, detail: str) -> None:
        self.failures.append({"point": point, "condition": condition, "detail": detail})


def is_palais_smale(inst: Instance) -> bool:
    """Every edge x -> y has out-degree(x) > out-degree(y)"""
    graph = build_graph(inst)
    return all(graph.out_degree(e.src) > graph.out_degree(e.dst) for e in graph.edges)


def verify_kt_basis(classes: Mapping[FixedPoint, EqClass], inst: Instance,
                    check_duality: bool = True) -> KtReport:
    """
    Check support, homogeneity, diagonal, GKM divisibility and duality

    Args:
        classes: One candidate class per fixed point
        inst: Instance the classes live on
        check_duality: Also evaluate every integral against delta

    Returns:
        Report listing each failed (class, condition)
    """
    graph = build_graph(inst)
    digraph = nx.DiGraph()
    digraph.add_nodes_from(fixed_points(inst))
    digraph.add_edges_from((e.src, e.dst) for e in graph.edges)
    report = KtReport(unique=is_palais_smale(inst))

    for x, c in classes.items():
        name = format_point(x, inst)
        report.checked += 1
        diagonal = product(-e.label for e in graph.outgoing[x])
        if c(x) != diagonal:
            report.fail(name, "diagonal", f"{c(x)} != {diagonal}")
        degree = diagonal.degree()
        reaching = nx.ancestors(digraph, x) | {x}
        for y in fixed_points(inst):
            f = c(y)
            if f.is_zero:
                continue
            if y not in reaching:
                report.fail(name, "support", f"nonzero at {format_point(y, inst)} without a path")
            elif not f.is_homogeneous() or f.degree() != degree:
                report.fail(name, "homogeneity", f"degree {f.degree()} at {format_point(y, inst)}")
        for edge in gkm_compatible(c, inst):
            report.fail(name, "gkm", edge)
        if check_duality:
            for y in fixed_points(inst):
                expected = 1 if y == x else 0
                if integrate(c, y, inst) != expected:
                    report.fail(name, "duality", f"integral over {format_point(y, inst)} is not {expected}")
    if report.failures:
        logger.warning(f"{inst}: {len(report.failures)} Knutson-Tao check failures")
    return report


def structure_constants(x: FixedPoint, y: FixedPoint, inst: Instance) -> Dict[FixedPoint, Polynomial]:
    """
    Nonzero c_{x,y}^z with p^x * p^y = sum_z c_{x,y}^z p^z

    Raises:
        ComputationError: if some constant is not a polynomial
    """
    basis = _dual_basis(inst)
    px, py = basis[x], basis[y]
    common = {s for s in fixed_points(inst) if not px(s).is_zero and not py(s).is_zero}
    constants: Dict[FixedPoint, Polynomial] = {}
    for z in fixed_points(inst):
        terms = [
            RationalFunction.from_weights(px(s) * py(s), euler_weights(s, z, inst))
            for s in closed_cell_points(z, inst) if s in common
        ]
        if not terms:
            continue
        try:
            value = rat_sum(terms).to_polynomial()
        except NotDivisibleError as e:
            logger.error(f"c^{format_point(z, inst)} of {format_point(x, inst)}, {format_point(y, inst)}: {e}")
            raise ComputationError("non-polynomial structure constant") from e
        if not value.is_zero:
            constants[z] = value
    return constants


def tau_act(c: EqClass, steps: int) -> EqClass:
    """(tau^s c)|_p = rho^s(c|_{rotate(p, -s)})"""
    inst = c.inst
    return EqClass(inst, {
        p: rho_shift(c(rotate(p, -steps)), steps, inst.n) for p in fixed_points(inst)
    })


def class_to_json(x: FixedPoint, c: EqClass, inst: Instance) -> Dict[str, Any]:
    return {
        "point": format_point(x, inst),
        "degree": cell_dim(x, inst),
        "restrictions": [
            {"at": format_point(p, inst), "polynomial": f.to_json(), "text": str(f)}
            for p, f in c.restrictions.items()
        ],
    }


def basis_to_json(inst: Instance, points: Optional[List[FixedPoint]] = None) -> str:
    basis = _dual_basis(inst)
    chosen = points if points is not None else list(fixed_points(inst))
    data = {
        "instance": inst.to_json(),
        "classes": [class_to_json(x, basis[x], inst) for x in chosen],
    }
    return json.dumps(data, indent=2) + "\n"
