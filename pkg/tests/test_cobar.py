"""Tests for cobar elements, differentials, products and the BP filtration."""

from fractions import Fraction

import pytest

from novikov_eta.cobar import (
    AMOT,
    BP,
    BP_MOD2,
    P_Q,
    P_QMOD2,
    CobarElement,
    build_block,
    concatenate,
    d_squared_is_zero,
    differential,
    filtration,
    get_context,
    gr_project,
    parse_cobar,
    project_E,
    split_lift,
)
from novikov_eta.config import RunConfig, set_config
from novikov_eta.exceptions import BudgetError, ContextError, FiltrationError, IntegralityError
from novikov_eta.grading import MultiDegree


class TestContexts:
    def test_lookup(self):
        assert get_context("P;Q") is P_Q
        assert get_context("AMot;M2") is AMOT

    def test_unknown_context(self):
        with pytest.raises(ContextError):
            get_context("P;R")

    def test_flags(self):
        assert P_QMOD2.mod2 and not P_Q.mod2
        assert BP.is_bp and not P_Q.is_bp
        assert AMOT.is_motivic


class TestParse:
    def test_p_element(self):
        x = parse_cobar(P_Q, "q1^2[ζ1] + q0q1[ζ1^2]")
        assert x.terms == {((0, 2), ((1,),)): 1, ((1, 1), ((2,),)): 1}
        assert x.degree() == MultiDegree(1, 2, 6)

    def test_context_by_id(self):
        assert parse_cobar("P;Q", "[ζ1]") == parse_cobar(P_Q, "[z1]")

    def test_f2_coefficients_cancel(self):
        assert parse_cobar(P_Q, "[ζ1] + [ζ1]").is_zero()

    def test_slot_sums_expand(self):
        x = parse_cobar(P_Q, "q1[ζ2+ζ1^3]")
        assert x == parse_cobar(P_Q, "q1[ζ2] + q1[ζ1^3]")

    def test_bp_fraction(self):
        x = parse_cobar(BP, "4/3[t1^3]")
        assert x.terms[((), ((3,),))] == Fraction(4, 3)

    def test_non_local_coefficient(self):
        with pytest.raises(IntegralityError):
            parse_cobar(BP, "1/2[t1]")

    def test_motivic_weight(self):
        assert parse_cobar(AMOT, "[ξ1]").degree() == MultiDegree(1, 0, 2, 1)
        assert parse_cobar(AMOT, "τ[ξ1]").degree() == MultiDegree(1, 0, 2, 0)

    def test_repeated_tau_rejected(self):
        with pytest.raises(ValueError):
            parse_cobar(AMOT, "[τ0^2]")

    def test_mixed_contexts(self):
        with pytest.raises(ContextError):
            parse_cobar(P_Q, "[ζ1]") + parse_cobar(P_QMOD2, "[ζ1]")

    def test_inhomogeneous_degree(self):
        with pytest.raises(ContextError):
            parse_cobar(P_Q, "[ζ1] + [ζ1^2]").degree()


class TestDifferential:
    def test_zeta2(self):
        assert differential(parse_cobar(P_Q, "[ζ2]")) == parse_cobar(P_Q, "[ζ1|ζ1^2]")

    def test_zeta1_squared_is_a_cocycle(self):
        assert differential(parse_cobar(P_Q, "[ζ1^2]")).is_zero()

    def test_coefficient_coaction(self):
        assert differential(parse_cobar(P_Q, "q1[]")) == parse_cobar(P_Q, "q0[ζ1]")

    def test_coefficient_coaction_mod_q0(self):
        assert differential(parse_cobar(P_QMOD2, "q1[]")).is_zero()

    def test_bp_v1(self):
        assert differential(parse_cobar(BP, "v1[]")) == parse_cobar(BP, "2[t1]")

    def test_bp_v1_mod_2(self):
        assert differential(parse_cobar(BP_MOD2, "v1[]")).is_zero()

    def test_motivic_tau1(self):
        assert differential(parse_cobar(AMOT, "[τ1]")) == parse_cobar(AMOT, "[ξ1|τ0]")

    def test_tau0_squared_relation(self):
        assert differential(parse_cobar(AMOT, "[ξ1]")).is_zero()

    @pytest.mark.parametrize("text", ["[ζ1]", "q1^2[ζ1] + q0q1[ζ1^2] + q0^2[ζ1^3]"])
    def test_known_cocycles(self, text):
        assert differential(parse_cobar(P_Q, text)).is_zero()

    def test_d_squared(self):
        x = parse_cobar(P_Q, "q2[ζ1] + q1[ζ2]")
        assert differential(differential(x)).is_zero()


class TestProducts:
    def test_concatenate_words(self):
        h0 = parse_cobar(P_Q, "[ζ1]")
        assert concatenate(h0, h0) == parse_cobar(P_Q, "[ζ1|ζ1]")

    def test_prefix_is_distributed(self):
        product = concatenate(parse_cobar(P_Q, "[ζ1]"), parse_cobar(P_Q, "q1[]"))
        assert product == parse_cobar(P_Q, "q1[ζ1] + q0[ζ1^2]")

    def test_leibniz(self):
        a = parse_cobar(P_Q, "q1[]")
        b = parse_cobar(P_Q, "[ζ1]")
        assert differential(concatenate(a, b)) == concatenate(differential(a), b)

    def test_contexts_must_match(self):
        with pytest.raises(ContextError):
            concatenate(parse_cobar(P_Q, "[ζ1]"), parse_cobar(P_QMOD2, "[ζ1]"))


class TestFiltration:
    def test_two_t1(self):
        x = parse_cobar(BP, "2[t1]")
        assert filtration(x) == 1
        assert gr_project(x, 1) == parse_cobar(P_Q, "q0[ζ1]")

    def test_zero(self):
        assert filtration(CobarElement(BP)) is None

    def test_projection_below_filtration(self):
        with pytest.raises(FiltrationError):
            gr_project(parse_cobar(BP, "[t1]"), 1)

    def test_only_bp(self):
        with pytest.raises(ContextError):
            filtration(parse_cobar(P_Q, "[ζ1]"))

    def test_split_lift(self):
        assert split_lift(parse_cobar(P_Q, "q0^2[ζ1]")) == parse_cobar(BP, "4[t1]")
        assert split_lift(parse_cobar(P_QMOD2, "q1[ζ1]")).context == BP_MOD2

    def test_split_lift_is_a_section(self):
        z = parse_cobar(P_Q, "q1^2[ζ1] + q0q1[ζ1^2] + q0^2[ζ1^3]")
        assert gr_project(split_lift(z), 2) == z

    def test_project_e(self):
        x = parse_cobar(P_Q, "q1^2[ζ1] + q0q1[ζ1^2]")
        assert set(project_E(x).terms) == {((0, 2),)}


class TestBlocks:
    def test_block_basis(self):
        block = build_block(P_Q, 1, 0, 6)
        assert sorted(block.basis) == sorted([((), ((0, 1),)), ((), ((3,),))])

    def test_coordinates_reject_foreign_terms(self):
        block = build_block(P_Q, 1, 0, 2)
        with pytest.raises(ContextError):
            block.coordinates(parse_cobar(P_Q, "[ζ1^2]"))

    @pytest.mark.parametrize("context", [P_Q, P_QMOD2])
    def test_d_squared_on_blocks(self, context):
        for s in range(2):
            block = build_block(context, s, 1, 8)
            following = build_block(context, s + 1, 1, 8)
            assert d_squared_is_zero(block, following)

    def test_budget(self):
        set_config(RunConfig(block_budget=1))
        with pytest.raises(BudgetError):
            build_block(P_Q, 1, 0, 6)

    def test_bp_has_no_blocks(self):
        with pytest.raises(ContextError):
            build_block(BP, 1, 0, 2)

    def test_motivic_weighted_block(self):
        block = build_block(AMOT, 1, 0, 2, 1)
        assert block.basis == ((0, (((1,), ()),)),)
