from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from k3dt import igusa
from k3dt.igusa import CertificateError, IgusaTable, igusa_c, jacobi_table, maass_lift_coeff
from k3dt.series import InsufficientTruncation, TruncationSpec

from oracles import chi10_product, elliptic_genus_coeffs

SMALL = TruncationSpec(3, 3, 6)


@pytest.fixture(scope="module")
def table():
    return IgusaTable.build(SMALL)


class TestJacobiTable:
    def test_coeffs(self):
        t = jacobi_table(4)
        assert t.coeff(1, 1) == 1 and t.coeff(1, 0) == -2
        assert t.coeff(2, 1) == -16 and t.coeff(2, 0) == 36
        assert t.coeff(0, 0) == 0

    def test_raises_beyond_table(self):
        with pytest.raises(InsufficientTruncation) as info:
            jacobi_table(2).coeff(3, 0)
        assert info.value.needed.q_max == 3

    def test_depends_on_discriminant_only(self):
        classes = jacobi_table(10).discriminant_classes()
        assert all(len(vals) == 1 for vals in classes.values())
        assert all(vals == {0} for d, vals in classes.items() if d < -1)


class TestLift:
    def test_b_equal_one_is_phi(self):
        t = jacobi_table(4)
        for a in range(1, 5):
            for l in range(-4, 5):
                assert maass_lift_coeff(a, l, 1, t) == t.coeff(a, l)

    def test_coprime(self):
        t = jacobi_table(6)
        assert maass_lift_coeff(2, 1, 3, t) == t.coeff(6, 1)

    def test_gcd_two(self):
        t = jacobi_table(4)
        assert t.coeff(4, 2) == -272
        assert maass_lift_coeff(2, 2, 2, t) == -272 + 2 ** 9 * t.coeff(1, 1) == 240

    def test_rejects_nonpositive_b(self):
        with pytest.raises(ValueError):
            maass_lift_coeff(1, 0, 0, jacobi_table(1))

    def test_leading_slice(self):
        chi = igusa.chi10(TruncationSpec(3, 3))
        assert chi.t_low == 1
        assert chi.coeff(1, 1, 0) == -2
        assert chi.coeff(1, 1, 1) == chi.coeff(1, 1, -1) == 1
        phi = jacobi_table(3)
        for a in range(1, 4):
            for l in range(-3, 4):
                assert chi.coeff(1, a, l) == phi.coeff(a, l)

    def test_against_borcherds_product(self):
        n = 5
        product = chi10_product(n)
        chi = igusa.chi10(TruncationSpec(n, n))
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                for l in range(-10, 11):
                    assert chi.coeff(b, a, l) == product.get((a, l, b), 0), (a, l, b)

    def test_product_exponents_are_k3_elliptic_genus(self):
        disc = elliptic_genus_coeffs(2)
        assert [disc[d] for d in (-1, 0, 3, 4, 7, 8)] == [2, 20, -128, 216, -1026, 1616]


class TestInverse:
    def test_pole_order(self):
        inv = igusa.inv_chi10(SMALL)
        assert inv.t_low == -1
        assert inv.slice(-1).q_low == -1

    def test_round_trip(self):
        # convolve against the product-formula oracle, independent of the package's multiplication
        n = 4
        product = chi10_product(n + 2)
        inv = igusa.inv_chi10(TruncationSpec(n, n, 6))
        for nt in range(0, n):
            for j in range(0, n):
                for k in range(-2, 3):
                    total = Fraction(0)
                    for (a, l, b), v in product.items():
                        hh, nn, mm = j - a, nt - b, k - l
                        if hh >= -1 and nn >= -1:
                            total += v * inv.coeff(nn, hh, mm)
                    assert total == (1 if (nt, j, k) == (0, 0, 0) else 0), (nt, j, k)

    def test_values(self, table):
        assert table[-1, -1, 1] == 1
        assert table[-1, -1, 2] == 2
        assert table[0, -1, 0] == 2
        assert table[0, -1, 1] == 24
        assert table[1, -1, -1] == 3
        assert table[1, -1, 1] == 327

    def test_pole_bound(self, table):
        assert table.lookup(-2, 5, 0) == (0, "pole bound")
        assert table.lookup(4, -3, 100) == (0, "pole bound")
        assert table.lookup(0, 0, 0)[1] == "table"

    def test_raises_outside_certificate(self, table):
        with pytest.raises(InsufficientTruncation) as info:
            table.lookup(4, 0, 0)
        assert info.value.needed.covers(TruncationSpec(4, 0, 0))
        with pytest.raises(InsufficientTruncation):
            table.lookup(0, 0, 7)

    def test_symmetry_h_n(self, table):
        for h in range(-1, 4):
            for n in range(-1, 4):
                for m in range(-8, 7):
                    assert igusa_c(h, n, m, table) == igusa_c(n, h, m, table)

    def test_dt0_slice(self):
        dt0 = igusa.dt_series(0, TruncationSpec(2, 0, 4))
        assert dt0.q_low == -1
        assert [dt0.coeff(-1, k) for k in range(0, 5)] == [0, -1, -2, -3, -4]
        assert [dt0.coeff(0, k) for k in range(0, 5)] == [-2, -24, -48, -72, -96]

    def test_dt_series_negative(self):
        with pytest.raises(ValueError):
            igusa.dt_series(-1, SMALL)


class TestExtension:
    def test_extension_keeps_entries(self, table):
        bigger = table.extend(TruncationSpec(4, 2, 8))
        assert bigger.trunc == TruncationSpec(4, 3, 8)
        for key, v in table.entries.items():
            assert bigger.entries[key] == v

    def test_covered_extension_is_identity(self, table):
        assert table.extend(TruncationSpec(1, 1, 1)) is table

    def test_tampered_table_detected(self, table):
        bad = IgusaTable(dict(table.entries), table.trunc)
        bad.entries[(0, 0, 0)] = Fraction(1)
        with pytest.raises(CertificateError):
            bad.extend(TruncationSpec(4, 3, 6))


@settings(max_examples=25, deadline=None)
@given(st.integers(-1, 2), st.integers(-1, 2), st.integers(-4, 4),
       st.integers(0, 2), st.integers(0, 2), st.integers(0, 3))
def test_coefficients_independent_of_truncation(h, n, m, dq, dt, dp):
    base = TruncationSpec(2, 2, 4)
    big = TruncationSpec(2 + dq, 2 + dt, 4 + dp)
    assert IgusaTable.build(base)[h, n, m] == IgusaTable.build(big)[h, n, m]
