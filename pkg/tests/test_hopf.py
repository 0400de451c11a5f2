"""Tests for the coproducts, coactions and the BP right unit."""

from fractions import Fraction

import pytest

from novikov_eta.grading import V_FAMILY, Polynomial, Ring
from novikov_eta.hopf import (
    V_CTX,
    amot_degree,
    amot_mul,
    amot_weight,
    coaction_Q,
    diagonal_P,
    emot_mul,
    eta_R,
    m_in_v,
    reduced_coaction_Q,
    reduced_diagonal_AMot,
    reduced_diagonal_EMot,
    reduced_diagonal_P,
    v_in_m,
)

XI1 = ((1,), ())
TAU0 = ((), (1,))
TAU1 = ((), (0, 1))


class TestDiagonalP:
    def test_zeta1_is_primitive(self):
        assert diagonal_P((1,)) == frozenset({((1,), ()), ((), (1,))})
        assert reduced_diagonal_P((1,)) == frozenset()

    def test_zeta2(self):
        assert diagonal_P((0, 1)) == frozenset({((0, 1), ()), ((1,), (2,)), ((), (0, 1))})

    def test_zeta1_squared_has_no_cross_terms(self):
        assert reduced_diagonal_P((2,)) == frozenset()

    def test_zeta1_cubed(self):
        assert reduced_diagonal_P((3,)) == frozenset({((2,), (1,)), ((1,), (2,))})


class TestCoactionQ:
    def test_q0_is_primitive(self):
        assert coaction_Q((1,)) == frozenset({((1,), ())})

    def test_q1(self):
        assert coaction_Q((0, 1)) == frozenset({((0, 1), ()), ((1,), (1,))})

    def test_q1_modulo_q0(self):
        assert reduced_coaction_Q((0, 1), mod_q0=True) == frozenset()

    def test_q2(self):
        assert reduced_coaction_Q((0, 0, 1)) == frozenset({((0, 1), (2,)), ((1,), (0, 1))})


class TestBPGenerators:
    def test_v1_in_m_basis(self):
        v1 = v_in_m(1)
        assert v1.coefficient(((1,),)) == 2
        assert len(v1.terms) == 1

    def test_m1_in_v_basis(self):
        assert m_in_v(1).coefficient(((1,),)) == Fraction(1, 2)

    def test_right_unit_of_v1(self):
        image = eta_R(Polynomial.generator(V_CTX, V_FAMILY, 1, Ring.Q))
        assert image.coefficient(((1,), ())) == 1
        assert image.coefficient(((), (1,))) == 2
        assert len(image.terms) == 2

    def test_right_unit_of_v1_mod_2(self):
        image = eta_R(Polynomial.generator(V_CTX, V_FAMILY, 1, Ring.Q), mod2=True)
        assert image.terms == {((1,), ()): 1}

    def test_right_unit_of_v2_mod_2(self):
        image = eta_R(Polynomial.generator(V_CTX, V_FAMILY, 2, Ring.Q), mod2=True)
        assert image.coefficient(((0, 1), ())) == 1
        assert image.coefficient(((1,), (2,))) == 1
        assert image.coefficient(((2,), (1,))) == 1


class TestMotivic:
    @pytest.mark.parametrize("monomial,degree,weight", [(XI1, 2, 1), (TAU0, 1, 0), (TAU1, 3, 1)])
    def test_degree_and_weight(self, monomial, degree, weight):
        assert amot_degree(monomial) == degree
        assert amot_weight(monomial) == weight

    def test_tau0_squared(self):
        assert amot_mul(TAU0, TAU0) == (1, XI1)

    def test_exterior_product_vanishes(self):
        assert emot_mul(TAU0, TAU0) is None
        assert emot_mul(TAU0, TAU1) == (0, ((), (1, 1)))

    def test_tau1_coproduct(self):
        assert reduced_diagonal_AMot(TAU1) == frozenset({(0, XI1, TAU0)})

    def test_tau_is_primitive_in_the_exterior_quotient(self):
        assert reduced_diagonal_EMot(TAU1) == frozenset()

    def test_xi1_and_tau0_are_primitive(self):
        assert reduced_diagonal_AMot(XI1) == frozenset()
        assert reduced_diagonal_AMot(TAU0) == frozenset()
