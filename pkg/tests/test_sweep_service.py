"""Batch sweep over small instances."""

import pytest

from config.settings import get_default_config, update_config
from core.errors import BudgetExceededError
from core.model import Instance
from services import sweep_service
from services.sweep_service import SweepService


def make_service(**sweep):
    return SweepService(update_config(get_default_config(), {"sweep": sweep}))


def test_instances_cover_all_partitions():
    service = make_service(max_n=2, max_N=3)
    found = [(inst.n, inst.blocks) for inst in service.instances()]
    assert len(found) == 2 * (1 + 2 + 3)
    assert (2, (2, 1)) in found
    assert (1, (1, 1, 1)) in found


def test_row_contents():
    service = make_service(suites=["fixpoints", "graph"])
    table = service.start([Instance(3, (3,)), Instance(3, (3, 2))])
    assert list(table.columns) == ["n", "blocks", "points", "edge_count", "dim",
                                   "fixpoints", "graph", "seconds"]
    assert table["points"].tolist() == [7, 23]
    assert table["edge_count"].tolist()[0] == 9
    assert table["dim"].tolist()[0] == 2
    assert table["blocks"].tolist() == ["3", "3,2"]
    assert set(table["fixpoints"]) == {"pass"}
    assert not service.running


def test_cohomology_suites_skip_large_instances():
    service = make_service(suites=["graph", "abbv"], max_points=10)
    table = service.start([Instance(3, (3,)), Instance(3, (3, 2))])
    assert table["abbv"].tolist() == ["pass", "skipped"]
    assert table["graph"].tolist() == ["pass", "pass"]


def test_errors_are_recorded(monkeypatch):
    def refuse(inst, suite, budget):
        raise BudgetExceededError(suite, 10, 1)

    monkeypatch.setattr(sweep_service, "run_suite", refuse)
    service = make_service(suites=["fixpoints"])
    table = service.start([Instance(1, (1,)), Instance(2, (1,))])
    assert table["fixpoints"].tolist() == ["error", "error"]


def test_stop_before_start_is_harmless():
    service = make_service(suites=[])
    service.stop()
    table = service.start([Instance(2, (2,))])
    assert len(table) == 1


@pytest.mark.slow
def test_default_sweep_passes():
    table = SweepService(get_default_config()).start()
    assert len(table) == 4 * 18
    for suite in ["fixpoints", "edges", "graph"]:
        assert set(table[suite]) == {"pass"}
    assert set(table["abbv"]) == {"pass", "skipped"}
    assert (table["abbv"] == "skipped").sum() == 9
