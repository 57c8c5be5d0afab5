"""
gkmquiver - equivariant cohomology of cyclic quiver Grassmannians
Main entry point for the command line
"""

import argparse
import json
import sys
import os
from typing import Dict, List, Optional, Sequence, Tuple

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from config.settings import load_config, update_config
from core.cells import (dimension_of_variety, dims_rows, euler_characteristic,
                        hasse, poincare_polynomial, poset_to_dot, poset_to_json)
from core.cohomology import basis_to_json, dual_basis, structure_constants
from core.conventions import find_convention, format_named, load_reference
from core.errors import BudgetExceededError, ComputationError, InstanceError
from core.fixpoints import fixed_points, format_point, parse_point, point_to_json
from core.gkm import export_graph, gkm_graph
from core.model import Instance
from core.verify import SUITES, run_suite
from services.sweep_service import SweepService
from utils.helpers import rows_to_csv
from utils.logger import set_log_level, setup_logger

logger = setup_logger(__name__)

FORMATS = {
    "fixpoints": ("json", "csv"),
    "dims": ("json", "csv"),
    "poset": ("json", "csv", "dot"),
    "poincare": ("json", "csv"),
    "graph": ("json", "csv", "dot"),
    "basis": ("json", "csv"),
    "multiply": ("json", "csv"),
    "verify": ("json",),
    "sweep": ("json", "csv"),
}

Result = Tuple[str, int]


class UsageError(Exception):
    """Flag combination rejected after parsing"""


def _json(data) -> str:
    return json.dumps(data, indent=2) + "\n"


def cmd_fixpoints(inst: Instance, args: argparse.Namespace) -> Result:
    points = fixed_points(inst)
    if args.format == "csv":
        rows = [
            {"index": k, "point": format_point(p, inst),
             "boxes": " ".join(f"{b.l}.{b.i}" for b in p.boxes)}
            for k, p in enumerate(points)
        ]
        return rows_to_csv(rows, ["index", "point", "boxes"]), 0
    data = {
        "instance": inst.to_json(),
        "count": len(points),
        "points": [dict(point_to_json(p, inst), name=format_point(p, inst)) for p in points],
    }
    return _json(data), 0


def cmd_dims(inst: Instance, args: argparse.Namespace) -> Result:
    rows = dims_rows(inst)
    if args.format == "csv":
        return rows_to_csv(rows, ["point", "dim"]), 0
    return _json({"instance": inst.to_json(), "dim": dimension_of_variety(inst), "cells": rows}), 0


def cmd_poset(inst: Instance, args: argparse.Namespace) -> Result:
    if args.format == "dot":
        return poset_to_dot(inst), 0
    if args.format == "csv":
        rows = [{"x": format_point(x, inst), "s": format_point(s, inst)} for x, s in hasse(inst)]
        return rows_to_csv(rows, ["x", "s"]), 0
    return poset_to_json(inst), 0


def cmd_poincare(inst: Instance, args: argparse.Namespace) -> Result:
    coefficients = poincare_polynomial(inst)
    if args.format == "csv":
        rows = [{"degree": d, "cells": c} for d, c in enumerate(coefficients)]
        return rows_to_csv(rows, ["degree", "cells"]), 0
    data = {
        "instance": inst.to_json(),
        "coefficients": coefficients,
        "dim": dimension_of_variety(inst),
        "euler_characteristic": euler_characteristic(inst),
    }
    return _json(data), 0


def cmd_graph(inst: Instance, args: argparse.Namespace) -> Result:
    edges = gkm_graph(inst)
    convention = None
    code = 0
    if args.reference:
        labels = {(e.src, e.dst): e.label for e in edges}
        convention = find_convention(labels, load_reference(args.reference, inst), inst.n)
        if convention is None:
            sys.stderr.write("no convention matches the reference labels\n")
            code = 1
        else:
            sys.stderr.write(f"convention: sign={convention.sign} shift={convention.shift}\n")

    if args.format == "csv":
        rows = [
            {"src": format_point(e.src, inst), "dst": format_point(e.dst, inst), "label": str(e.label),
             **({"named": format_named(convention.label(e.label, inst.n))} if convention else {})}
            for e in edges
        ]
        columns = ["src", "dst", "label"] + (["named"] if convention else [])
        return rows_to_csv(rows, columns), code
    text = export_graph(edges, inst, args.format)
    if args.format == "json" and args.reference:
        data = json.loads(text)
        data["convention"] = convention.to_json() if convention else None
        text = _json(data)
    return text, code


def _points(inst: Instance, specs: Optional[Sequence[str]]):
    if not specs:
        return None
    return [parse_point(text, inst) for text in specs]


def cmd_basis(inst: Instance, args: argparse.Namespace) -> Result:
    chosen = _points(inst, args.point)
    if args.format == "csv":
        basis = dual_basis(inst)
        rows = [
            {"x": format_point(x, inst), "at": format_point(p, inst), "polynomial": str(f)}
            for x in (chosen or fixed_points(inst))
            for p, f in basis[x].restrictions.items()
        ]
        return rows_to_csv(rows, ["x", "at", "polynomial"]), 0
    return basis_to_json(inst, chosen), 0


def cmd_multiply(inst: Instance, args: argparse.Namespace) -> Result:
    if not args.x or not args.y:
        raise UsageError("multiply needs --x and --y")
    x, y = parse_point(args.x, inst), parse_point(args.y, inst)
    constants = structure_constants(x, y, inst)
    if args.format == "csv":
        rows = [{"z": format_point(z, inst), "c": str(c)} for z, c in constants.items()]
        return rows_to_csv(rows, ["z", "c"]), 0
    data = {
        "instance": inst.to_json(),
        "x": format_point(x, inst),
        "y": format_point(y, inst),
        "constants": [
            {"z": format_point(z, inst), "polynomial": c.to_json(), "text": str(c)}
            for z, c in constants.items()
        ],
    }
    return _json(data), 0


def cmd_verify(inst: Instance, args: argparse.Namespace, config: Dict) -> Result:
    reports = run_suite(inst, args.suite, config["oracle"]["budget"])
    data = {
        "instance": inst.to_json(),
        "passed": all(r.passed for r in reports),
        "reports": [r.to_json() for r in reports],
    }
    return _json(data), 0 if data["passed"] else 1


def cmd_sweep(args: argparse.Namespace, config: Dict) -> Result:
    overrides: Dict = {"sweep": {}}
    if args.max_n is not None:
        overrides["sweep"]["max_n"] = args.max_n
    if args.max_N is not None:
        overrides["sweep"]["max_N"] = args.max_N
    if args.suite:
        overrides["sweep"]["suites"] = args.suite
    service = SweepService(update_config(config, overrides))
    table = service.start().drop(columns=["seconds"])
    failed = bool(table[service.suites].isin(["fail", "error"]).any().any()) if service.suites else False
    code = 1 if failed else 0
    if args.format == "csv":
        return rows_to_csv(table.to_dict("records"), list(table.columns)), code
    return table.to_json(orient="records", indent=2) + "\n", code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gkmquiver",
        description="Fixed points, BB cells, GKM graph and dual basis of Gr_1(M) for the cyclic quiver.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="Log INFO (-v) or DEBUG (-vv) to stderr")
    parser.add_argument("--config", help="Configuration JSON (default: config/user_config.json)")
    subparsers = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-i", "--instance", required=True, help='Inline "n=3;blocks=3,2" or a JSON file')
    common.add_argument("--format", help="Output format (json, csv or dot where supported)")
    common.add_argument("--out", help="Write output to this path instead of stdout")

    subparsers.add_parser("fixpoints", parents=[common], help="List the torus fixed points")
    subparsers.add_parser("dims", parents=[common], help="Dimension of every BB cell")
    subparsers.add_parser("poset", parents=[common], help="Hasse diagram of the closed-cell order")
    subparsers.add_parser("poincare", parents=[common], help="Cell counts per dimension")

    p_graph = subparsers.add_parser("graph", parents=[common], help="Labeled GKM graph")
    p_graph.add_argument("--reference", help="JSON file of reference labels to match conventions against")

    p_basis = subparsers.add_parser("basis", parents=[common], help="Dual basis restrictions")
    p_basis.add_argument("--point", action="append", help="Only the class of this point (repeatable)")

    p_multiply = subparsers.add_parser("multiply", parents=[common], help="Structure constants of p^x * p^y")
    p_multiply.add_argument("--x", help="First point, e.g. I={0,1}")
    p_multiply.add_argument("--y", help="Second point")

    p_verify = subparsers.add_parser("verify", parents=[common], help="Run the brute-force oracles")
    p_verify.add_argument("--suite", default="all", choices=list(SUITES) + ["all"])
    p_verify.add_argument("--budget", type=int, help="Oracle budget (candidate count)")

    p_sweep = subparsers.add_parser("sweep", help="Run the oracles over all small instances")
    p_sweep.add_argument("--max-n", type=int, dest="max_n")
    p_sweep.add_argument("--max-N", type=int, dest="max_N")
    p_sweep.add_argument("--suite", action="append", choices=list(SUITES))
    p_sweep.add_argument("--format", help="csv or json")
    p_sweep.add_argument("--out", help="Write output to this path instead of stdout")
    return parser


def run(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    if getattr(args, "budget", None) is not None:
        config = update_config(config, {"oracle": {"budget": args.budget}})
    set_log_level(
        "DEBUG" if args.verbose > 1 else "INFO" if args.verbose else config["logging"]["level"]
    )

    args.format = args.format or config["output"]["format"]
    if args.format not in FORMATS[args.command]:
        raise UsageError(f"{args.command} does not support --format {args.format}")

    if args.command == "sweep":
        text, code = cmd_sweep(args, config)
    else:
        inst = Instance.parse(args.instance)
        logger.info(f"{args.command} on {inst}")
        if args.command == "verify":
            text, code = cmd_verify(inst, args, config)
        else:
            handlers = {
                "fixpoints": cmd_fixpoints,
                "dims": cmd_dims,
                "poset": cmd_poset,
                "poincare": cmd_poincare,
                "graph": cmd_graph,
                "basis": cmd_basis,
                "multiply": cmd_multiply,
            }
            text, code = handlers[args.command](inst, args)

    if args.out:
        with open(args.out, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return code


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one command and return its exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    try:
        return run(args)
    except (InstanceError, BudgetExceededError, UsageError) as e:
        sys.stderr.write(f"gkmquiver {args.command}: {e}\n")
        return 2
    except ComputationError as e:
        sys.stderr.write(f"gkmquiver {args.command}: computation failed: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
