"""Tests for the (stem, weight) DiffSync adapters."""

from unittest.mock import MagicMock

import pytest

from novikov_eta.datasets import SSDataset
from novikov_eta.diffsync.adapter_closed_form import ClosedFormAdapter, closed_form_names, closed_form_table
from novikov_eta.diffsync.adapter_routes import RouteAdapter
from novikov_eta.diffsync.models import DimensionEntry
from novikov_eta.grading import MultiDegree
from novikov_eta.motivic import run_localized_manss


@pytest.fixture
def eta_tower():
    """η^k at stem k, weight k, for |k| ≤ 2, plus a class without weight."""
    dataset = SSDataset(name="eta", context="motivic", page="Einf")
    for k in range(-2, 3):
        dataset.add(MultiDegree(k, 0, 2 * k, k), f"η^{k}")
    dataset.add(MultiDegree(1, 0, 2), "h0")
    return dataset


class TestClosedForm:
    def test_table(self):
        assert closed_form_table(0, 8) == {(0, 0): 1, (0, -3): 1, (0, -4): 1, (0, -7): 1, (0, -8): 1}

    def test_table_is_stem_periodic(self):
        table = closed_form_table(3, 12)
        for stem in range(-3, 4):
            assert {st - w for (st, w) in table if st == stem} == {0, 3, 4, 7, 8, 11, 12}

    @pytest.mark.parametrize(
        "coweight,names",
        [(0, ["1"]), (1, []), (3, ["σ"]), (4, ["μ9"]), (7, ["σ·μ9"]), (8, ["μ9^2"])],
    )
    def test_names(self, coweight, names):
        assert closed_form_names(coweight) == names

    def test_adapter(self):
        adapter = ClosedFormAdapter(max_stem=1, max_coweight=4)
        adapter.load()
        entry = adapter.get(DimensionEntry, {"stem": 1, "weight": -2})
        assert entry.dimension == 1
        assert entry.coweight == 3
        assert entry.names == "σ"
        assert len(adapter.get_all(DimensionEntry)) == 9


class TestRouteAdapter:
    def test_load(self, eta_tower):
        job = MagicMock()
        adapter = RouteAdapter(dataset=eta_tower, max_stem=1, max_coweight=0, job=job)
        adapter.load()
        entries = adapter.get_all(DimensionEntry)
        assert sorted((e.stem, e.weight) for e in entries) == [(-1, -1), (0, 0), (1, 1)]
        job.logger.warning.assert_called_once()

    def test_diff_against_closed_form(self, eta_tower):
        route = RouteAdapter(dataset=eta_tower, max_stem=2, max_coweight=0)
        closed = ClosedFormAdapter(max_stem=2, max_coweight=0)
        route.load()
        closed.load()
        assert not route.diff_to(closed).has_diffs()

    def test_missing_coweight_is_a_diff(self, eta_tower):
        route = RouteAdapter(dataset=eta_tower, max_stem=2, max_coweight=3)
        closed = ClosedFormAdapter(max_stem=2, max_coweight=3)
        route.load()
        closed.load()
        assert route.diff_to(closed).has_diffs()

    def test_route_a_matches(self):
        route = RouteAdapter(dataset=run_localized_manss(8, 3), max_stem=3, max_coweight=8)
        closed = ClosedFormAdapter(max_stem=3, max_coweight=8)
        route.load()
        closed.load()
        assert not route.diff_to(closed).has_diffs()
