"""Tests for Ext blocks, products and Massey products over P."""

import pytest

from novikov_eta.cobar import AMOT, P_Q, P_QMOD2, concatenate, differential, parse_cobar
from novikov_eta.exceptions import CocycleError, NotDefinedError, RegionError
from novikov_eta.ext import (
    ExtClass,
    ExtRegion,
    Region,
    cohomology,
    compute_ext_block,
    rebuild_ext_block,
    solve_coboundary,
    total_dimension,
)
from novikov_eta.grading import MultiDegree

H0 = MultiDegree(1, 0, 2)
H1 = MultiDegree(1, 0, 4)


@pytest.fixture(scope="module")
def steenrod():
    """H^{s,0,u}(P; F2) for s ≤ 2, u ≤ 8."""
    return cohomology(P_Q, Region(max_s=2, max_u=8))


class TestRegion:
    def test_contains(self):
        region = Region(max_s=3, max_u=10, max_t=2, max_s_plus_t=4)
        assert region.contains(MultiDegree(2, 2, 8))
        assert not region.contains(MultiDegree(3, 2, 8))
        assert not region.contains(MultiDegree(1, 0, 12))

    def test_degrees_skip_odd_u(self):
        degrees = list(Region(max_s=1, max_u=3).degrees(P_Q))
        assert {d.u for d in degrees} == {0, 2}

    def test_motivic_degrees_carry_weights(self):
        degrees = list(Region(max_s=0, max_u=2).degrees(AMOT))
        assert MultiDegree(0, 0, 1, 0) in degrees
        assert MultiDegree(0, 0, 2, 1) in degrees
        assert all(d.w is not None and d.w <= d.u // 2 for d in degrees)


class TestBlocks:
    @pytest.mark.parametrize(
        "degree,dimension",
        [
            (MultiDegree(0, 0, 0), 1),
            (H0, 1),
            (H1, 1),
            (MultiDegree(2, 0, 4), 1),
            (MultiDegree(1, 0, 6), 0),
            (MultiDegree(2, 0, 6), 0),
        ],
    )
    def test_dimensions(self, steenrod, degree, dimension):
        assert steenrod.dimension(degree) == dimension

    @pytest.mark.parametrize("degree,name", [(MultiDegree(0, 0, 0), "1"), (H0, "h0"), (H1, "h1")])
    def test_labels(self, steenrod, degree, name):
        assert steenrod.block(degree).names == [name]

    def test_q0_tower(self):
        engine = ExtRegion(P_Q, Region(max_s=1, max_u=2, max_t=3))
        for t in range(4):
            assert engine.dimension(MultiDegree(0, t, 0)) == 1

    def test_q0_kills_h0(self):
        engine = ExtRegion(P_Q, Region(max_s=1, max_u=2, max_t=1))
        assert engine.dimension(MultiDegree(1, 1, 2)) == 0

    def test_coefficient_module_matters(self):
        region = Region(max_s=0, max_u=2, max_t=1)
        assert ExtRegion(P_Q, region).dimension(MultiDegree(0, 1, 2)) == 0
        assert ExtRegion(P_QMOD2, region).dimension(MultiDegree(0, 1, 2)) == 1
        assert ExtRegion(P_QMOD2, region).dimension(MultiDegree(0, 1, 0)) == 0

    def test_outside_region(self, steenrod):
        with pytest.raises(RegionError):
            steenrod.block(MultiDegree(3, 0, 6))

    def test_total_dimension(self, steenrod):
        assert total_dimension(steenrod, 1, 2) == 1

    def test_rebuild(self):
        computed = compute_ext_block(P_Q, MultiDegree(2, 0, 4))
        rebuilt = rebuild_ext_block(P_Q, computed.degree, computed.representatives)
        assert rebuilt.dimension == computed.dimension
        assert rebuilt.representatives == computed.representatives

    def test_rebuild_rejects_non_cocycles(self):
        with pytest.raises(CocycleError):
            rebuild_ext_block(P_Q, MultiDegree(1, 0, 6), (0b01,))

    def test_rebuild_rejects_boundaries(self):
        computed = compute_ext_block(P_Q, MultiDegree(2, 0, 6))
        assert computed.dimension == 0
        boundary = computed.block.coordinates(parse_cobar(P_Q, "[ζ1|ζ1^2]"))
        with pytest.raises(CocycleError):
            rebuild_ext_block(P_Q, computed.degree, (sum(1 << i for i in boundary),))


class TestClasses:
    def test_class_of(self, steenrod):
        x = steenrod.parse_class("[ζ1]")
        assert x.coordinates == (1,)
        assert x.name == "h0"

    def test_boundary_is_zero(self, steenrod):
        assert steenrod.parse_class("[ζ1|ζ1^2]").is_zero()

    def test_not_a_cocycle(self, steenrod):
        with pytest.raises(CocycleError):
            steenrod.parse_class("[ζ2]")

    def test_products(self, steenrod):
        h0 = steenrod.parse_class("[ζ1]")
        h1 = steenrod.parse_class("[ζ1^2]")
        assert steenrod.product(h0, h0).name == "h0^2"
        assert steenrod.product(h0, h1).is_zero()
        assert steenrod.product(h1, h0).is_zero()
        assert not steenrod.product(h1, h1).is_zero()

    def test_power(self, steenrod):
        h0 = steenrod.parse_class("[ζ1]")
        assert steenrod.power(h0, 2) == steenrod.product(h0, h0)

    def test_product_outside_region(self, steenrod):
        h0 = steenrod.parse_class("[ζ1]")
        with pytest.raises(RegionError):
            steenrod.power(h0, 3)

    def test_addition(self, steenrod):
        h0 = steenrod.parse_class("[ζ1]")
        assert (h0 + h0).is_zero()
        with pytest.raises(RegionError):
            h0 + steenrod.parse_class("[ζ1^2]")

    def test_zero_class(self, steenrod):
        zero = ExtClass.zero(steenrod.block(H0))
        assert zero.name == "0"
        assert zero.representative().is_zero()


class TestCoboundaries:
    def test_solve(self):
        z = parse_cobar(P_Q, "[ζ1|ζ1^2]")
        y = solve_coboundary(z)
        assert y is not None
        assert differential(y) == z

    def test_not_a_coboundary(self):
        assert solve_coboundary(parse_cobar(P_Q, "[ζ1|ζ1]")) is None

    def test_zero(self):
        assert solve_coboundary(parse_cobar(P_Q, "[ζ1] + [ζ1]")).is_zero()


class TestMassey:
    def test_h0_h1_h0(self, steenrod):
        h0 = steenrod.parse_class("[ζ1]")
        h1 = steenrod.parse_class("[ζ1^2]")
        coset = steenrod.massey(h0, h1, h0)
        h1_squared = steenrod.class_of(concatenate(parse_cobar(P_Q, "[ζ1^2]"), parse_cobar(P_Q, "[ζ1^2]")))
        assert coset.indeterminacy_dimension == 0
        assert coset.contains(h1_squared)
        assert not coset.representative.is_zero()

    def test_not_defined(self, steenrod):
        h0 = steenrod.parse_class("[ζ1]")
        with pytest.raises(NotDefinedError):
            steenrod.massey(h0, h0, h0)


@pytest.mark.slow
class TestParallel:
    def test_workers_agree(self):
        region = Region(max_s=2, max_u=8, max_t=1)
        serial = cohomology(P_Q, region, workers=1)
        parallel = cohomology(P_Q, region, workers=2)
        assert {d: b.dimension for d, b in serial.blocks.items()} == {
            d: b.dimension for d, b in parallel.blocks.items()
        }
