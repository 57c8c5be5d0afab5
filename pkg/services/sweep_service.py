"""
Sweep service for gkmquiver
Runs the oracle suites over every small instance and tabulates the outcome
"""

import time
from typing import Any, Dict, Iterable, List, Optional

import pandas as pd

from config.settings import load_config
from core.cells import dimension_of_variety
from core.errors import GkmQuiverError
from core.fixpoints import count_fixed_points
from core.gkm import gkm_graph
from core.model import Instance, partitions
from core.verify import run_suite
from utils.logger import setup_logger

logger = setup_logger(__name__)

COHOMOLOGY_SUITES = {"abbv", "basis", "tau", "products"}
COLUMNS = ["n", "blocks", "points", "edge_count", "dim"]


class SweepService:
    """Batch verification over all instances with n <= max_n and N <= max_N"""

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        self.config = config if config is not None else load_config()
        sweep = self.config.get('sweep', {})
        self.max_n = sweep.get('max_n', 4)
        self.max_N = sweep.get('max_N', 5)
        self.max_points = sweep.get('max_points', 64)
        self.suites = list(sweep.get('suites', []))
        self.budget = self.config.get('oracle', {}).get('budget', 1000000)
        self.running = False

        logger.info(f"Sweep service initialized: n <= {self.max_n}, N <= {self.max_N}")
        logger.info(f"Suites: {self.suites}")

    def instances(self) -> List[Instance]:
        return [
            Instance(n, blocks)
            for n in range(1, self.max_n + 1)
            for total in range(1, self.max_N + 1)
            for blocks in partitions(total)
        ]

    def start(self, instances: Optional[Iterable[Instance]] = None) -> pd.DataFrame:
        """Run every suite on every instance; one row per instance"""
        self.running = True
        rows = []
        for inst in (instances if instances is not None else self.instances()):
            if not self.running:
                logger.info("Sweep stopped before completion")
                break
            rows.append(self.process_instance(inst))
        self.running = False
        return pd.DataFrame(rows, columns=COLUMNS + self.suites + ["seconds"])

    def process_instance(self, inst: Instance) -> Dict[str, Any]:
        start = time.perf_counter()
        points = count_fixed_points(inst)
        row: Dict[str, Any] = {
            "n": inst.n,
            "blocks": ",".join(map(str, inst.blocks)),
            "points": points,
            "edge_count": len(gkm_graph(inst)),
            "dim": dimension_of_variety(inst),
        }
        for suite in self.suites:
            if suite in COHOMOLOGY_SUITES and points > self.max_points:
                row[suite] = "skipped"
                continue
            try:
                reports = run_suite(inst, suite, self.budget)
                row[suite] = "pass" if all(r.passed for r in reports) else "fail"
            except GkmQuiverError as e:
                logger.error(f"{inst}: suite {suite} failed: {e}")
                row[suite] = "error"
        row["seconds"] = round(time.perf_counter() - start, 3)
        logger.info(f"{inst}: {row}")
        return row

    def stop(self):
        """Stop after the current instance"""
        self.running = False
        logger.info("Sweep service stopping...")
