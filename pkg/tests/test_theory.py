from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from k3dt import theory
from k3dt.igusa import IgusaTable
from k3dt.series import TruncationSpec
from k3dt.theory import CurveClassSpec, MukaiTriple, MukaiVector, mukai_pairing

from oracles import eta_product, sigma, wp_coeff

Q = 5
INV_DELTA = eta_product(-24, Q + 1)  # q * (1 / Delta)


def e2_coeff(j):
    return 1 if j == 0 else -24 * sigma(j)


def over_delta(coeff, j):
    """``[q^j] f / Delta`` for ``f`` given by ``coeff(i)``, ``j >= -1``."""
    return sum(coeff(i) * INV_DELTA[j + 1 - i] for i in range(j + 2))


def yau_zaslow(j):
    return over_delta(lambda i: -2 * e2_coeff(i), j)


@pytest.fixture(scope="module")
def table():
    return IgusaTable.build(TruncationSpec(4, 3, 6))


class TestQuot:
    def test_inverse_phi_values(self):
        assert [theory.quot_q(0, 0, m) for m in range(0, 5)] == [0, 1, 2, 3, 4]
        assert [theory.quot_q(0, 1, m) for m in range(0, 5)] == [2, 24, 48, 72, 96]
        assert [theory.quot_q(0, 2, m) for m in range(-2, 5)] == [0, 3, 48, 327, 648, 972, 1296]

    @pytest.mark.parametrize("h", range(0, 4))
    @pytest.mark.parametrize("m", range(-3, 5))
    def test_q1_against_oracle(self, h, m):
        # G / (Theta^2 Delta) = (wp - E2/12) / Delta
        expected = over_delta(lambda i: wp_coeff(i, m) - (Fraction(e2_coeff(i), 12) if m == 0 else 0), h - 1)
        assert theory.quot_q(1, h, m) == expected

    def test_examples(self):
        assert theory.quot_q(1, 1, 0) == 0
        assert theory.quot_q(2, 2, 3) == 973

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            theory.quot_q(-1, 0, 0)
        with pytest.raises(ValueError):
            theory.quot_q(0, -1, 0)

    def test_multiplicativity(self):
        t = TruncationSpec(4, 0, 5)
        lhs = theory.quot_series(2, t) * theory.quot_series(0, t)
        rhs = theory.quot_series(1, t) * theory.quot_series(1, t)
        for j in range(-2, 3):
            for k in range(-5, 6):
                assert lhs.coeff(j, k) == rhs.coeff(j, k)


class TestMukai:
    def test_pairing(self):
        v = MukaiVector(1, (0, 0), 0)
        assert mukai_pairing(v, v) == 0
        assert mukai_pairing(MukaiVector(0, (1, 0), 0), MukaiVector(0, (1, 0), 0)) == -2
        assert mukai_pairing(MukaiVector(1, (0, 0), 1), MukaiVector(0, (0, 0), 1)) == -1

    @settings(max_examples=60, deadline=None)
    @given(st.integers(-1, 20), st.integers(-1, 20), st.integers(-20, 20))
    def test_normal_form_round_trip(self, a, b, uv):
        triple = MukaiTriple(2 * a, 2 * b, uv)
        v, u = triple.normal_form_vectors()
        assert MukaiTriple.from_vectors(v, u) == triple

    def test_quot_euler_lookup(self):
        assert theory.quot_euler_by_pairings(MukaiTriple(-2, -2, -1)) == 1
        assert theory.quot_euler_by_pairings(MukaiTriple(2, 2, -3)) == theory.quot_q(2, 2, 3) == 973

    def test_validation(self):
        with pytest.raises(ValueError):
            MukaiTriple(1, 0, 0)
        with pytest.raises(ValueError):
            MukaiTriple(-4, 0, 0)
        with pytest.raises(ValueError):
            MukaiTriple(0, -4, 0)


class TestCurveClass:
    def test_validation(self):
        for args in ((0, 1, 0, 0), (1, -1, 0, 0), (1, 1, -1, 0)):
            with pytest.raises(ValueError):
                CurveClassSpec(*args)

    def test_divisors(self):
        assert CurveClassSpec(6, 2, 0, 0).cover_divisors() == [1, 2, 3, 6]
        assert CurveClassSpec(6, 2, 0, 4).cover_divisors() == [1, 2]
        assert CurveClassSpec(6, 2, 0, 5).cover_divisors() == [1]
        assert CurveClassSpec(2, 3, 0, 0).beta_square == 16
        assert CurveClassSpec(2, 3, 0, 0).half_square(2) == 2


class TestDT:
    def test_primitive_relation(self, table):
        for h0 in range(0, 4):
            for n in range(0, 3):
                for m in range(-4, 5):
                    spec = CurveClassSpec(1, h0, n, m)
                    assert theory.dt_imprimitive(spec, table) == (-1) ** (m + 1) * table[h0 - 1, n - 1, m]

    def test_examples(self, table):
        assert theory.dt_imprimitive(CurveClassSpec(1, 1, 0, 0), table) == -2
        assert theory.dt_imprimitive(CurveClassSpec(2, 1, 0, 0), table) == -3
        assert theory.dt_imprimitive(CurveClassSpec(2, 1, 0, 1), table) == 24

    def test_dt1_against_weierstrass(self, table):
        # DT_1 = -24 wp / Delta
        for h0 in range(0, 5):
            for m in range(-4, 5):
                series = over_delta(lambda i: -24 * wp_coeff(i, m), h0 - 1)
                dt = theory.dt_imprimitive(CurveClassSpec(1, h0, 1, m), table)
                assert dt == (-1) ** m * series


class TestGW:
    def test_h1_is_yau_zaslow(self):
        h1 = theory.gw_series(1, TruncationSpec(4, 0, 6))
        for j in range(-1, 5):
            assert h1.coeff(j, 0) == yau_zaslow(j)
            assert all(h1.coeff(j, k) == 0 for k in range(-6, 7) if k)

    def test_h0_vanishes(self, table):
        h0 = theory.gw_series(0, TruncationSpec(3, 0, 6))
        assert all(h0.coeff(j, k) == 0 for j in range(-1, 4) for k in range(-6, 7))
        for d in (1, 2, 3):
            for m in range(-2, 3):
                assert theory.gw_hilb_imprimitive(CurveClassSpec(d, 1, 0, m), table) == 0

    def test_imprimitive_multiple_cover(self, table):
        assert theory.gw_hilb_imprimitive(CurveClassSpec(2, 2, 1, 0), table) == 1410372
        for d, h0 in ((1, 0), (1, 3), (2, 1), (2, 2), (3, 1)):
            spec = CurveClassSpec(d, h0, 1, 0)
            expected = sum(Fraction(1, r) * yau_zaslow(spec.half_square(r)) for r in spec.cover_divisors())
            assert theory.gw_hilb_imprimitive(spec, table) == expected

    def test_n1_nonzero_m_is_zero(self, table):
        for m in (-3, -1, 1, 2):
            assert theory.gw_hilb_imprimitive(CurveClassSpec(1, 2, 1, m), table) == 0


class TestIdentity:
    def test_holds(self):
        report = theory.verify_conjecture_a(TruncationSpec(3, 2, 5))
        assert report.passed and report.checked > 0
        assert report.first_difference is None

    def test_detects_missing_correction(self):
        report = theory.verify_conjecture_a(TruncationSpec(3, 2, 5), include_correction=False)
        assert not report.passed
        n, h, m, lhs, rhs = report.first_difference
        assert lhs != rhs
