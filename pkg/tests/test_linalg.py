"""Tests for F2 and F2[τ] linear algebra."""

import numpy as np
import pytest

from novikov_eta.linalg import (
    BitMatrix,
    EchelonBasis,
    TauMatrix,
    bits_to_int,
    gf2x_divmod,
    gf2x_gcd,
    gf2x_mul,
    int_to_bits,
    nullspace,
    rref,
    snf_tau,
    solve,
    tau_power,
)

TAU = 0b10
TAU2 = 0b100


@pytest.fixture
def chain():
    """Rows {0, 1} and {1, 2}: rank 2, kernel spanned by (1, 1, 1)."""
    return BitMatrix.from_rows([[0, 1], [1, 2]], 3)


class TestBitMatrix:
    def test_repeated_indices_cancel(self):
        assert BitMatrix.from_rows([[0, 0]], 2).is_zero()

    def test_rank(self, chain):
        assert chain.rank() == 2
        assert BitMatrix.from_rows([[0, 1], [0, 1]], 2).rank() == 1

    def test_dense_roundtrip(self, chain):
        dense = chain.to_dense()
        assert dense.tolist() == [[1, 1, 0], [0, 1, 1]]
        assert BitMatrix.from_dense(dense) == chain

    def test_transpose(self, chain):
        assert chain.transpose().to_dense().tolist() == [[1, 0], [1, 1], [0, 1]]

    def test_identity_product(self, chain):
        assert BitMatrix.identity(2).matmul(chain) == chain

    def test_apply(self, chain):
        assert chain.apply([1, 1, 1]) == [0, 0]

    def test_wide_rows(self):
        m = BitMatrix.from_rows([[0, 70, 129]], 130)
        assert m.row_indices(0) == [0, 70, 129]
        assert m.row_int(0) == (1 << 129) | (1 << 70) | 1

    def test_toggle_out_of_range(self):
        with pytest.raises(IndexError):
            BitMatrix.from_rows([[3]], 3)

    def test_from_dense_rejects_vectors(self):
        with pytest.raises(ValueError):
            BitMatrix.from_dense(np.zeros(3))


class TestElimination:
    def test_nullspace(self, chain):
        kernel = nullspace(chain)
        assert kernel.rows == 1
        assert kernel.row_int(0) == 0b111

    def test_solve(self, chain):
        x = solve(chain, [1, 0])
        assert x == [1, 0, 0]
        assert chain.apply(x) == [1, 0]

    def test_inconsistent(self):
        m = BitMatrix.from_rows([[0], [0]], 1)
        assert solve(m, [1, 0]) is None

    def test_rhs_length(self, chain):
        with pytest.raises(ValueError):
            solve(chain, [1])

    def test_transform(self):
        m = BitMatrix.from_rows([[1, 2], [0, 1], [0, 2]], 3)
        pivots, reduced, transform = rref(m)
        assert pivots == [0, 1]
        assert transform.matmul(m) == reduced


class TestEchelonBasis:
    def test_tags_follow_reductions(self):
        basis = EchelonBasis()
        assert basis.insert(0b011, 1)
        assert basis.insert(0b110, 2)
        assert basis.reduce(0b101) == (0, 3)
        assert not basis.insert(0b101)
        assert len(basis) == 2

    def test_normal_form(self):
        basis = EchelonBasis()
        basis.insert(0b011)
        basis.insert(0b110)
        assert basis.normal_form(0b100) == 0b001
        assert basis.contains(0b101)
        assert not basis.contains(0b001)

    def test_bit_packing(self):
        assert bits_to_int([0, 2, 2]) == 1
        assert int_to_bits(0b1010) == [1, 3]


class TestTauPolynomials:
    def test_frobenius(self):
        assert gf2x_mul(0b11, 0b11) == 0b101

    def test_divmod(self):
        assert gf2x_divmod(0b101, 0b11) == (0b11, 0)
        assert gf2x_divmod(0b111, 0b10) == (0b11, 1)

    def test_gcd(self):
        assert gf2x_gcd(0b101, 0b11) == 0b11

    @pytest.mark.parametrize("value,expected", [(1, 0), (0b1000, 3), (0b11, None), (0, None)])
    def test_tau_power(self, value, expected):
        assert tau_power(value) == expected


class TestTauMatrix:
    def test_specialize(self):
        m = TauMatrix(1, 1, [[0b11]])
        assert m.at_tau(1).is_zero()
        assert m.at_tau(0).get(0, 0) == 1

    def test_snf_orders_divisors(self):
        m = TauMatrix(2, 2, [[TAU2, 0], [0, TAU]])
        diagonal, u, v = snf_tau(m)
        assert diagonal == [TAU, TAU2]
        assert u.matmul(m).matmul(v) == TauMatrix(2, 2, [[TAU, 0], [0, TAU2]])

    def test_snf_row(self):
        diagonal, _, _ = snf_tau(TauMatrix(1, 2, [[TAU2, TAU]]))
        assert diagonal == [TAU]

    def test_snf_of_zero(self):
        diagonal, _, _ = snf_tau(TauMatrix(2, 3))
        assert diagonal == []

    def test_sparse(self):
        m = TauMatrix.from_sparse([{0: TAU}, {}], 2)
        assert m.entries == [[TAU, 0], [0, 0]]
