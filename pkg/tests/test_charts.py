"""Tests for chart emission."""

import pytest

from novikov_eta.charts import ChartSpec, add_input_arrows, chart, dataset_from_engine, emit, parse_tsv
from novikov_eta.cobar import P_Q
from novikov_eta.datasets import SSArrow, SSDataset
from novikov_eta.exceptions import RegionError
from novikov_eta.ext import Region, cohomology
from novikov_eta.grading import MultiDegree


@pytest.fixture
def small_page():
    dataset = SSDataset(name="small", context="P;Q", page="E2")
    dataset.add(MultiDegree(1, 0, 2), "h0", tower=True)
    dataset.add(MultiDegree(2, 0, 4), "h0^2", tower=True)
    dataset.add(MultiDegree(1, 1, 4), "x")
    dataset.add_arrow("h0", MultiDegree(1, 0, 2), MultiDegree(2, 0, 4))
    return dataset


@pytest.fixture(scope="module")
def steenrod():
    return cohomology(P_Q, Region(max_s=2, max_u=4))


class TestSpec:
    def test_unknown_projection(self):
        with pytest.raises(ValueError):
            ChartSpec(projection="serre")

    def test_projections(self):
        degree = MultiDegree(1, 1, 4)
        assert ChartSpec().position(degree) == (3, 1)
        assert ChartSpec(projection="adams").position(degree) == (3, 2)


class TestTSV:
    def test_novikov(self, small_page):
        nodes, arrows = parse_tsv(emit(ChartSpec(max_x=4, max_y=3), small_page, "tsv"))
        assert nodes == {
            (1, 1): (1, True, ("h0",)),
            (2, 2): (1, True, ("h0^2",)),
            (3, 1): (1, False, ("x",)),
        }
        assert arrows == [("h0", (1, 1), (2, 2))]

    def test_golden(self, small_page):
        assert emit(ChartSpec(max_x=4, max_y=3), small_page, "tsv") == (
            b"stem\ty\tt\tweight\tmultiplicity\tlabels\tarrows\n"
            b"1\t1\t0\t\t1+\th0\th0:2,2\n"
            b"2\t2\t0\t\t1+\th0^2\t\n"
            b"3\t1\t1\t\t1\tx\t\n"
        )

    def test_adams(self, small_page):
        nodes, _ = parse_tsv(emit(ChartSpec(projection="adams", max_x=4, max_y=3), small_page, "tsv"))
        assert (3, 2) in nodes
        assert (3, 1) not in nodes

    def test_window(self, small_page):
        nodes, arrows = parse_tsv(emit(ChartSpec(max_x=2, max_y=1), small_page, "tsv"))
        assert list(nodes) == [(1, 1)]
        assert arrows == []

    def test_overlays(self, small_page):
        spec = ChartSpec(max_x=4, max_y=3, overlays=frozenset({"d1"}))
        _, arrows = parse_tsv(emit(spec, small_page, "tsv"))
        assert arrows == []

    def test_not_a_chart(self):
        with pytest.raises(ValueError):
            parse_tsv(b"a\tb\n")


class TestSVG:
    def test_deterministic(self, small_page):
        spec = ChartSpec(max_x=4, max_y=3)
        first = emit(spec, small_page)
        assert first == emit(spec, small_page)
        assert first.startswith(b"<?xml")
        assert b"<rect" in first
        assert b"<circle" in first

    def test_unknown_format(self, small_page):
        with pytest.raises(ValueError):
            emit(ChartSpec(), small_page, "png")


class TestRegion:
    def test_window_past_region(self, small_page):
        small_page.metadata["region"] = Region(max_s=1, max_u=4)
        with pytest.raises(RegionError):
            emit(ChartSpec(max_x=4, max_y=3), small_page, "tsv")


class TestEngineCharts:
    def test_h0_lines(self, steenrod):
        dataset = dataset_from_engine(steenrod)
        arrows = {(a.kind, a.source, a.target) for a in dataset.arrows}
        assert ("h0", MultiDegree(1, 0, 2), MultiDegree(2, 0, 4)) in arrows
        assert ("h0", MultiDegree(0, 0, 0), MultiDegree(1, 0, 2)) in arrows

    def test_chart(self, steenrod):
        nodes, arrows = parse_tsv(chart(steenrod, ChartSpec(max_x=2, max_y=2), "tsv"))
        assert nodes[(0, 0)][2] == ("1",)
        assert nodes[(1, 1)][2] == ("h0",)
        assert nodes[(2, 2)] == (1, True, ("h0^2",))
        assert arrows == [("h0", (0, 0), (1, 1)), ("h0", (1, 1), (2, 2))]

    def test_input_arrows(self, steenrod):
        extra = [SSArrow("input", MultiDegree(1, 0, 2), MultiDegree(2, 0, 4), "given")]
        dataset = add_input_arrows(dataset_from_engine(steenrod, products=False), extra)
        assert [(a.kind, a.label) for a in dataset.arrows] == [("input", "given")]
