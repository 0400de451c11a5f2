"""Tests for the algebraic Novikov layer: d1, Margolis homology, localization and ᾱ_s."""

import pytest

from novikov_eta.cobar import BP, BP_MOD2, P_Q, P_QMOD2, differential, parse_cobar
from novikov_eta.exceptions import CertificationError, SearchError
from novikov_eta.ext import ExtRegion, Region, cohomology
from novikov_eta.grading import MultiDegree
from novikov_eta.novikov import (
    BP_COCYCLES,
    MASSEY_COCYCLES,
    MargolisData,
    alpha_representative,
    assemble_Einfty,
    certified_line,
    derive_generator_d1,
    detect_alpha,
    detect_class,
    einfty_inclusion,
    einfty_mismatches,
    einfty_prediction,
    eta_r_congruence,
    expected_alpha_detection,
    localize_h0,
    localized_d1,
    localized_generators,
    localized_page,
    margolis_prediction,
    minimal_lift_exponent,
    module_context,
    novikov_d1,
    novikov_d1_cochain,
    p1,
    surjectivity_line,
    v2_t1_coefficient,
    vanishing_violations,
)

Q1 = (0, 1)
Q2 = (0, 0, 1)
Q3 = (0, 0, 0, 1)


class TestCocycles:
    @pytest.mark.parametrize("text", BP_COCYCLES)
    def test_bp_cocycles(self, text):
        assert differential(parse_cobar(BP, text)).is_zero()

    @pytest.mark.parametrize("text", MASSEY_COCYCLES)
    def test_p_cocycles(self, text):
        assert differential(parse_cobar(P_Q, text)).is_zero()

    @pytest.mark.parametrize("n", [1, 2])
    def test_right_unit_congruence(self, n):
        assert eta_r_congruence(n)


class TestNovikovD1:
    def test_h0_is_a_permanent_cycle(self):
        engine = ExtRegion(P_Q, Region(max_s=2, max_u=4, max_t=1))
        image = novikov_d1(engine, engine.parse_class("[ζ1]"))
        assert image.degree == MultiDegree(2, 1, 2)
        assert image.is_zero()

    def test_cochain_level(self):
        assert novikov_d1_cochain(parse_cobar(P_Q, "[ζ1]"), 0).is_zero()


class TestMargolis:
    def test_p1(self):
        assert p1(Q1) == frozenset({(1,)})
        assert p1(Q1, "Qmod2") == frozenset()
        assert p1(Q2) == frozenset()

    @pytest.mark.parametrize("module_id", ["Q", "Qmod2"])
    def test_homology_is_polynomial(self, module_id):
        data = MargolisData(module_id, 3, 12)
        for t in range(4):
            for u in range(0, 13, 2):
                assert data.dimension(t, u) == margolis_prediction(module_id, t, u), (t, u)

    def test_predictions(self):
        assert margolis_prediction("Q", 1, 2) == 0
        assert margolis_prediction("Qmod2", 1, 2) == 1
        assert margolis_prediction("Q", 2, 4) == 1

    def test_generators(self):
        assert localized_generators("Q", 14) == [(0, 2), Q2, Q3]
        assert localized_generators("Qmod2", 6) == [Q1, Q2]

    def test_q0_is_in_the_image(self):
        group = MargolisData("Q", 1, 2).group(1, 0)
        assert group.dimension == 0
        assert group.p1_preimage([(1,)]) == frozenset({Q1})

    def test_module_context(self):
        assert module_context("mod2") is P_QMOD2
        assert module_context("Q") is P_Q


class TestLocalization:
    def test_lines(self):
        assert surjectivity_line(5, 2)
        assert not surjectivity_line(6, 2)
        assert certified_line(4, 3)
        assert not certified_line(5, 3)

    def test_detection_of_h0_powers(self):
        engine = ExtRegion(P_Q, Region(max_s=2, max_u=4))
        detection = detect_class(engine.parse_class("[ζ1|ζ1]"))
        assert detection.name == "h0^2"
        assert not detection.is_zero

    def test_shallow_region(self):
        engine = cohomology(P_Q, Region(max_s=1, max_u=4, max_t=1))
        with pytest.raises(CertificationError):
            localize_h0(engine)

    def test_vanishing(self):
        engine = cohomology(P_Q, Region(max_s=2, max_u=8, max_t=2))
        assert vanishing_violations(engine) == []

    @pytest.mark.slow
    def test_certified_region(self):
        engine = cohomology(P_Q, Region(max_s=4, max_u=12, max_t=2))
        groups = localize_h0(engine)
        assert any(group.certified for group in groups.values())
        assert all(group.bijective for group in groups.values() if group.certified)


class TestLocalizedPage:
    def test_d1(self):
        assert localized_d1(Q3) == frozenset({(0, 0, 2)})
        assert localized_d1(Q2) == frozenset()
        assert localized_d1((0, 0, 0, 2)) == frozenset()

    def test_q3_cancels_q2_squared(self):
        page = localized_page("Q", 3, 14)
        assert page[(1, 14)].e1 == 1
        assert page[(1, 14)].e2 == 0
        assert page[(2, 12)].e2 == 0

    def test_survivors(self):
        page = localized_page("Q", 2, 6)
        assert page[(0, 0)].names == ("1",)
        assert page[(2, 4)].names == ("q1^2",)

    def test_assemble(self):
        dataset = assemble_Einfty("Q", 2, 2, 8)
        labels = {(item.degree, item.name) for item in dataset.classes}
        assert (MultiDegree(1, 0, 2), "h0") in labels
        assert (MultiDegree(2, 0, 4), "h0^2") in labels
        assert (MultiDegree(1, 2, 6), "q1^2·h0") in labels
        assert all(item.tower for item in dataset.classes)
        assert dataset.page == "Einf"

    def test_inclusion(self):
        report = einfty_inclusion(2, 8)
        assert report[(0, 0)] == (1, 1, 1)
        assert report[(1, 2)] == (0, 1, 0)

    def test_inclusion_is_injective(self):
        report = einfty_inclusion(3, 16)
        assert report[(2, 4)] == (1, 1, 1)
        assert all(rank == sphere for sphere, _moore, rank in report.values())

    def test_cycles_and_boundaries(self):
        page = localized_page("Qmod2", 3, 14)
        assert len(page[(2, 12)].boundaries) == 1
        assert page[(2, 12)].cycles == []
        group = page[(3, 10)]
        assert group.names == ("q1^2·q2",)
        assert group.cycles == [group.vector([(0, 2, 1)])]

    @pytest.mark.parametrize("module_id", ["Q", "Qmod2"])
    def test_matches_closed_form(self, module_id):
        dataset = assemble_Einfty(module_id, 3, 3, 18)
        assert einfty_mismatches(dataset, 3, 3, 18) == []

    @pytest.mark.parametrize("t,a,count", [(0, 0, 1), (1, 6, 1), (2, 4, 1), (2, 12, 0), (3, 10, 1), (1, 14, 0)])
    def test_prediction(self, t, a, count):
        assert einfty_prediction("Q", t, a) == count

    def test_missing_d1_is_caught(self, monkeypatch):
        monkeypatch.setattr("novikov_eta.novikov.localized_d1", lambda m: frozenset())
        dataset = assemble_Einfty("Q", 3, 3, 16)
        mismatches = einfty_mismatches(dataset, 3, 3, 16)
        assert (1, 2, 14, 1, 0) in mismatches
        assert (1, 1, 16, 1, 0) in mismatches
        assert "q2^2·h0" in {item.name for item in dataset.classes}


class TestAlpha:
    def test_odd_representative_is_a_cocycle(self):
        assert differential(alpha_representative(3)).is_zero()

    def test_invalid_index(self):
        with pytest.raises(ValueError):
            alpha_representative(0)

    @pytest.mark.parametrize("s,name", [(1, "h0"), (2, None), (3, "q1^2·h0"), (4, "q2·h0^4")])
    def test_expected_detection(self, s, name):
        assert expected_alpha_detection(s) == name

    @pytest.mark.parametrize("s", [1, 3])
    def test_detection(self, s):
        record = detect_alpha(s)
        assert record.detection == expected_alpha_detection(s)
        assert record.complex == BP.id

    def test_alpha2_has_no_detection(self):
        assert detect_alpha(2).detection is None

    def test_v2_coefficient(self):
        assert v2_t1_coefficient(parse_cobar(BP_MOD2, "v2[t1|t1|t1|t1] + v1[t1^3|t1|t1|t1]")) == 1

    def test_even_v2_coefficient_is_rejected(self):
        with pytest.raises(CertificationError):
            v2_t1_coefficient(parse_cobar(BP_MOD2, "v1^3[t1|t1|t1|t1]"))

    @pytest.mark.slow
    @pytest.mark.parametrize("s", [4, 5, 6])
    def test_detection_higher(self, s):
        assert detect_alpha(s).detection == expected_alpha_detection(s)


class TestGeneratorDifferentials:
    def test_lift_needs_the_region(self):
        with pytest.raises(SearchError):
            minimal_lift_exponent(2, ExtRegion(P_Q, Region(max_s=1, max_u=8, max_t=2)))

    @pytest.mark.slow
    def test_q3_differential(self):
        engine = cohomology(P_Q, Region(max_s=6, max_u=24, max_t=2))
        lift = minimal_lift_exponent(2, engine)
        assert lift.target_name == "q3"
        assert lift.exponent == 3
        assert differential(lift.representative).is_zero()
        record = derive_generator_d1(2, engine)
        assert record.generator == "q3"
        assert record.detection == record.expected == "q2^2·h0^4"
        assert record.agrees
