"""Acceptance gate: ten exact identities, each over a fixed region and time envelope.

Run with ``pytest tests/test_acceptance.py -s`` to see one line per criterion.
"""
from fractions import Fraction

import pytest

from k3dt import forms, igusa, theory
from k3dt.igusa import IgusaTable
from k3dt.series import TruncationSpec, invert, log_derivative_sq

from oracles import eta_product

W8 = range(-8, 9)
# inverting a slice with a simple pole costs one p-order per q-order
P_TARGET = 24


def assert_equal_q(lhs, rhs, q_range, p_range):
    for j in q_range:
        for k in p_range:
            assert lhs.coeff(j, k) == rhs.coeff(j, k), (j, k, lhs.coeff(j, k), rhs.coeff(j, k))


def inv_delta(q_max):
    return invert(forms.delta(TruncationSpec(q_max + 2)), q_max=q_max)


def test_a1_delta_against_naive_product(criterion):
    with criterion("A1 Delta vs naive product, q <= 10", 1):
        d = forms.build_form("delta", TruncationSpec(10))
        oracle = [0] + eta_product(24, 9)
        assert [d.coeff(j, 0) for j in range(11)] == oracle


def test_a2_weierstrass(criterion):
    with criterion("A2 lds(Theta^2) + wp - E2/12 = 0, q <= 8, |p| <= 8", 5):
        t = TruncationSpec(8, 0, 8)
        theta = forms.theta_sq(TruncationSpec(8, 0, P_TARGET))
        total = log_derivative_sq(theta, q_max=8, p_high=P_TARGET) + forms.wp(t) - forms.e2(t).scale(Fraction(1, 12))
        for j in range(9):
            for k in W8:
                assert total.coeff(j, k) == 0, (j, k)


def test_a3_dt0(criterion):
    with criterion("A3 qt^-1 slice of 1/chi_10 = 1/(Theta^2 Delta), q <= 8, |p| <= 8", 30):
        inv = igusa.inv_chi10(TruncationSpec(8, -1, 8))
        phi = forms.phi_10_1(TruncationSpec(10))
        rhs = -invert(phi, q_max=8, p_high=P_TARGET)
        assert_equal_q(-inv.slice(-1), rhs, range(-1, 9), W8)


def test_a4_dt1(criterion):
    with criterion("A4 qt^0 slice of -1/chi_10 = -24 wp/Delta, q <= 6, |p| <= 8", 60):
        inv = igusa.inv_chi10(TruncationSpec(6, 0, 8))
        rhs = (forms.wp(TruncationSpec(7, 0, 8)) * inv_delta(6)).scale(-24)
        assert_equal_q(-inv.slice(0), rhs, range(-1, 7), W8)


def test_a5_yau_zaslow(criterion):
    with criterion("A5 DT_1 + 24 Q_1 = -2 E2/Delta, q <= 6, |p| <= 8", 60):
        t = TruncationSpec(6, 0, 8)
        lhs = igusa.dt_series(1, t) + theory.quot_series(1, t).scale(24)
        rhs = (forms.e2(TruncationSpec(7)) * inv_delta(6)).scale(-2)
        assert_equal_q(lhs, rhs, range(-1, 7), W8)
        for j in range(-1, 7):
            assert all(lhs.coeff(j, k) == 0 for k in W8 if k)


def test_a6_gw_series_identity(criterion):
    with criterion("A6 sum H_n qt^(n-1) identity, qt <= 4, q <= 5, |p| <= 8", 300):
        report = theory.verify_conjecture_a(TruncationSpec(5, 4, 8))
        assert report.checked > 0
        assert report.passed, report.first_difference


def test_a7_lift_symmetry(criterion):
    with criterion("A7 chi_10 symmetric, even, supported on 4ab >= l^2, a, b <= 6", 30):
        chi = igusa.chi10(TruncationSpec(6, 6))
        for a in range(1, 7):
            for b in range(1, 7):
                for l in W8:
                    v = chi.coeff(b, a, l)
                    assert v == chi.coeff(a, b, l)
                    assert v == chi.coeff(b, a, -l)
                    if 4 * a * b < l * l:
                        assert v == 0


def test_a8_jacobi_index_one(criterion):
    with criterion("A8 phi_10_1 coefficients depend on 4a - l^2 only, a <= 10", 1):
        phi = forms.phi_10_1(TruncationSpec(10))
        by_disc = {}
        for a in range(1, 11):
            for l in range(-(2 * a + 2), 2 * a + 3):
                v = phi.coeff(a, l)
                assert by_disc.setdefault(4 * a - l * l, v) == v, (a, l)
        assert all(v == 0 for d, v in by_disc.items() if d < -1)


@pytest.fixture(scope="module")
def warm_table():
    return IgusaTable.build(TruncationSpec(3, 2, 5))


def test_a9_primitive_multiple_cover(criterion, warm_table):
    with criterion("A9 d = 1 multiple cover = (-1)^(m+1) c(h0-1, n-1, m), h0 <= 4, n <= 3, |m| <= 5", 10):
        for h0 in range(0, 5):
            for n in range(0, 4):
                for m in range(-5, 6):
                    spec = theory.CurveClassSpec(1, h0, n, m)
                    value = theory.dt_imprimitive(spec, warm_table)
                    assert value == (-1) ** (m + 1) * igusa.igusa_c(h0 - 1, n - 1, m, warm_table)


def test_a10_multiplicativity(criterion):
    with criterion("A10 Q_2 Q_0 = Q_1^2, q <= 6, |p| <= 6", 10):
        t = TruncationSpec(8, 0, 14)
        q0, q1, q2 = (theory.quot_series(n, t) for n in range(3))
        assert_equal_q(q2 * q0, q1 * q1, range(-2, 7), range(-6, 7))
