"""Tests for τ-extension, the localized DGAs and the motivic Adams E2."""

import pytest

from novikov_eta.cobar import AMOT, differential
from novikov_eta.datasets import SSDataset
from novikov_eta.exceptions import GradingError, RegionError
from novikov_eta.ext import Region
from novikov_eta.grading import MultiDegree
from novikov_eta.motivic import (
    GI_TARGET_DEGREE,
    DGAGenerator,
    DGAPresentation,
    MotivicExtBlock,
    adams_presentation,
    adams_tridegree,
    anss_presentation,
    compare_routes,
    localize_motivic,
    localized_monomial_count,
    localized_motivic_adams,
    motivic_adams_e2,
    motivic_engine,
    run_localized_manss,
    snf_decomposition,
    tau_extend,
    tau_is_boundary,
    tau_weight,
    to_adams_grading,
    verify_gi_target,
)


@pytest.fixture
def h0_tower():
    dataset = SSDataset(name="h0", context="P;Q", page="E2")
    dataset.add(MultiDegree(1, 0, 2), "h0", tower=True)
    dataset.add(MultiDegree(2, 0, 4), "h0^2", tower=True)
    dataset.add_arrow("h0", MultiDegree(1, 0, 2), MultiDegree(2, 0, 4))
    return dataset


class TestTauExtension:
    def test_weight(self):
        assert tau_weight(2, 0) == 1
        assert tau_weight(8, 1) == 3

    def test_odd_internal_degree(self):
        with pytest.raises(GradingError):
            tau_weight(3, 0)

    def test_extend(self, h0_tower):
        extended = tau_extend(h0_tower, max_tau=1)
        names = {(item.degree, item.name) for item in extended.classes}
        assert names == {
            (MultiDegree(1, 0, 2, 1), "h0"),
            (MultiDegree(1, 0, 2, 0), "τ·h0"),
            (MultiDegree(2, 0, 4, 2), "h0^2"),
            (MultiDegree(2, 0, 4, 1), "τ·h0^2"),
        }
        assert extended.metadata["max_tau"] == 1

    def test_arrows_keep_weight(self, h0_tower):
        extended = tau_extend(h0_tower, max_tau=1)
        assert len(extended.arrows) == 2
        assert all(arrow.source.w == arrow.target.w for arrow in extended.arrows)

    def test_odd_class_rejected(self, h0_tower):
        h0_tower.add(MultiDegree(1, 0, 3), "x")
        with pytest.raises(GradingError):
            tau_extend(h0_tower)


class TestAdamsGrading:
    @pytest.mark.parametrize(
        "novikov,adams",
        [
            (MultiDegree(1, 0, 2), MultiDegree(1, 0, 2, 1)),
            (MultiDegree(0, 1, 0), MultiDegree(1, 0, 1, 0)),
            (MultiDegree(1, 2, 14), MultiDegree(3, 0, 16, 7)),
        ],
    )
    def test_tridegree(self, novikov, adams):
        assert adams_tridegree(novikov) == adams
        assert adams_tridegree(novikov).stem == novikov.stem

    def test_odd_u(self):
        with pytest.raises(GradingError):
            adams_tridegree(MultiDegree(0, 0, 3))

    def test_regrade(self):
        dataset = SSDataset(name="einf", context="P;Q", page="Einf")
        dataset.add(MultiDegree(1, 1, 8), "q2·h0", tower=True)
        regraded = to_adams_grading(dataset)
        (item,) = regraded.classes
        assert item.degree == MultiDegree(2, 0, 9, 4)
        assert item.name == "v2·h0"
        assert item.tower


class TestPresentations:
    def test_unit_must_have_coweight_zero(self):
        with pytest.raises(GradingError):
            DGAPresentation(name="bad", unit=DGAGenerator("u", 1, 2, 1), generators=())

    def test_generators_need_positive_coweight(self):
        with pytest.raises(GradingError):
            DGAPresentation(
                name="bad", unit=DGAGenerator("h0", 1, 1, 1), generators=(DGAGenerator("g", 1, 1, 1),)
            )

    def test_d_squared(self):
        anss_presentation().check(8)
        adams_presentation(8).check(9)

    def test_anss_homology(self):
        homology = anss_presentation().homology(4)
        assert [name for name, _ in homology[(3, -6)]] == ["ᾱ4"]
        assert [name for name, _ in homology[(4, -8)]] == ["ᾱ5"]
        assert homology[(1, 0)] == []

    def test_tau_is_a_boundary(self):
        assert tau_is_boundary()

    def test_adams_generators(self):
        names = [g.name for g in adams_presentation(8).generators]
        assert names == ["v1^4", "v2", "v3"]

    def test_manss_metadata(self):
        dataset = run_localized_manss(4, 2)
        assert dataset.page == "Einf"
        assert dataset.metadata["route"] == "A"


class TestMotivicAdams:
    def test_snf(self):
        decomposition = snf_decomposition(AMOT, 1, 2)
        assert decomposition.free_rank == 1
        assert decomposition.torsion == ()

    def test_h0_generates_a_free_tau_chain(self):
        blocks = motivic_adams_e2(Region(max_s=1, max_u=2))
        assert blocks[MultiDegree(1, 0, 2, 1)].free_generators == 1
        assert blocks[MultiDegree(1, 0, 2, 0)].dimension == 1
        assert blocks[MultiDegree(1, 0, 2, 0)].free_generators == 0

    def test_gi_target_outside_region(self):
        with pytest.raises(RegionError):
            verify_gi_target(motivic_engine(Region(max_s=1, max_u=2)))

    def test_gi_tower_needs_depth_plus_one_members(self):
        with pytest.raises(RegionError):
            verify_gi_target(motivic_engine(Region(max_s=5, max_u=20)), stability_depth=2)

    @pytest.mark.slow
    def test_gi_target(self):
        target = verify_gi_target(motivic_engine(Region(max_s=5, max_u=20)), stability_depth=1)
        assert target.degree == GI_TARGET_DEGREE == MultiDegree(3, 0, 16, 7)
        assert target.cell == (10, 4)
        assert target.dimensions[:3] == (0, 0, 0)
        assert target.dimensions[-2:] == (1, 1)
        assert target.top == MultiDegree(5, 0, 20, 9)
        assert differential(target.representative).is_zero()


class TestLocalizedMotivic:
    @pytest.mark.parametrize("a,b,count", [(0, 0, 1), (4, 0, 1), (5, 2, 1), (1, 0, 0), (8, 0, 1)])
    def test_monomial_count(self, a, b, count):
        assert localized_monomial_count(a, b) == count

    def test_stable_tower(self):
        blocks = {
            MultiDegree(s, 0, 2 * s, s): MotivicExtBlock(MultiDegree(s, 0, 2 * s, s), 1, 1) for s in range(1, 4)
        }
        entries = localize_motivic(blocks, Region(max_s=3, max_u=6), stability_depth=2)
        assert len(entries) == 1
        entry = entries[0]
        assert (entry.a, entry.b) == (0, 0)
        assert entry.stable
        assert entry.dimension == entry.expected == 1
        assert entry.top_s == 3


class TestRouteComparison:
    def test_routes_agree_with_closed_form(self):
        route_a = run_localized_manss(8, 3)
        route_b = adams_presentation(8).page(8, range(-3, 4), "Einf")
        report = compare_routes(route_a, route_b, 8, 3)
        assert report.agrees, report
        assert report.coweight_lines[0] == "1"
        assert report.coweight_lines[1] == ""

    def test_differences_are_itemized(self):
        route_a = run_localized_manss(8, 3)
        empty = SSDataset(name="empty", context="motivic", page="Einf")
        report = compare_routes(route_a, empty, 8, 3)
        assert not report.agrees
        assert report.route_a_vs_closed_form == []
        assert (0, 0, 1, 0) in report.route_a_vs_b


class TestRouteBCertification:
    def test_h0_tower_certifies_coweight_zero(self):
        route_b = localized_motivic_adams(
            Region(max_s=3, max_u=6), stability_depth=2, max_coweight=0, max_stem=3, check_gi=False
        )
        assert route_b.metadata["uncertified"] == []
        assert route_b.metadata["stable"] == 1
        assert {item.name for item in route_b.classes} >= {"1", "h0", "h0^-1"}
        report = compare_routes(run_localized_manss(0, 3), route_b, 0, 3)
        assert report.agrees, report

    def test_cells_outside_region_fail_the_comparison(self):
        route_b = localized_motivic_adams(
            Region(max_s=3, max_u=6), stability_depth=2, max_coweight=4, max_stem=3, check_gi=False
        )
        uncertified = route_b.metadata["uncertified"]
        assert (4, 0, "outside region") in uncertified
        assert (5, 2, "outside region") in uncertified
        cells = {(item.degree.u - 2 * item.degree.s, item.degree.w - item.degree.s) for item in route_b.classes}
        assert cells == {(0, 0)}
        report = compare_routes(run_localized_manss(4, 3), route_b, 4, 3)
        assert not report.agrees
        assert report.uncertified == uncertified

    def test_wrong_dimension_withholds_the_cell(self):
        blocks = {
            MultiDegree(s, 0, 2 * s, s): MotivicExtBlock(MultiDegree(s, 0, 2 * s, s), 2, 2) for s in range(1, 4)
        }
        route_b = localized_motivic_adams(
            Region(max_s=3, max_u=6), blocks=blocks, stability_depth=2, max_coweight=0, max_stem=3, check_gi=False
        )
        assert route_b.metadata["mismatches"] == [(0, 0, 2, 1)]
        assert route_b.metadata["uncertified"] == [(0, 0, "dimension 2, expected 1")]
        assert len(route_b) == 0
