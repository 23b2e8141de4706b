"""Igusa cusp form chi_10 as the additive lift of phi_{10,1}, and its inverse.

Exponent bookkeeping: ``q^a p^l qt^b`` for chi_10, ``q^h qt^n p^m`` for the
coefficients ``c(h, n, m)`` of ``1/chi_10``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Tuple

from . import forms
from .series import (
    InsufficientTruncation,
    QSeries,
    TriSeries,
    TruncationSpec,
)

# every p-pole is expanded in ascending powers of p (region |p| < 1)
CONVENTION_TAG = "ascending-p"

WEIGHT = 10
_P_MARGIN = 8
_MAX_DOUBLINGS = 8


class CertificateError(RuntimeError):
    """A previously certified coefficient disagrees with a recomputation."""


@dataclass
class JacobiCoeffTable:
    """Coefficients ``c_phi(a, l)`` of phi_{10,1}, exact for ``a <= a_max``."""

    entries: Dict[Tuple[int, int], Fraction]
    a_max: int

    @classmethod
    def build(cls, a_max: int) -> "JacobiCoeffTable":
        phi = forms.phi_10_1(TruncationSpec(max(a_max, 1)))
        entries = {key: Fraction(v) for key, v in phi.to_dict().items() if key[0] <= a_max}
        return cls(entries, a_max)

    def coeff(self, a: int, l: int) -> Fraction:
        if a < 1:
            return Fraction(0)
        if a > self.a_max:
            raise InsufficientTruncation(
                f"phi_10_1 coefficient at q^{a} needs a table to a_max={a}",
                TruncationSpec(q_max=a),
            )
        return self.entries.get((a, l), Fraction(0))

    def discriminant_classes(self) -> Dict[int, set]:
        """Map ``4a - l^2`` to the set of values seen for it."""
        seen: Dict[int, set] = {}
        for (a, l), v in self.entries.items():
            seen.setdefault(4 * a - l * l, set()).add(v)
        return seen


@lru_cache(maxsize=None)
def jacobi_table(a_max: int) -> JacobiCoeffTable:
    return JacobiCoeffTable.build(a_max)


def maass_lift_coeff(a: int, l: int, b: int, table: JacobiCoeffTable) -> Fraction:
    """Coefficient of ``q^a p^l qt^b`` in chi_10.

    ``sum_{d | (a, l, b)} d^9 c_phi(ab/d^2, l/d)``.
    """
    if b < 1:
        raise ValueError("the lift is only defined for qt-exponent b >= 1")
    if a < 1:
        return Fraction(0)
    g = math.gcd(math.gcd(a, l), b)
    total = Fraction(0)
    for d in range(1, g + 1):
        if g % d == 0:
            total += d ** (WEIGHT - 1) * table.coeff(a * b // (d * d), l // d)
    return total


@lru_cache(maxsize=None)
def _chi10(q_max: int, t_max: int) -> TriSeries:
    table = jacobi_table(max(q_max * t_max, 1))
    slices = {}
    for b in range(1, t_max + 1):
        coeffs = {}
        for a in range(1, q_max + 1):
            # c_phi vanishes for 4ab < l^2
            bound = math.isqrt(4 * a * b)
            for l in range(-bound, bound + 1):
                v = maass_lift_coeff(a, l, b, table)
                if v:
                    coeffs[(a, l)] = v
        slices[b] = QSeries.from_dict(coeffs, q_high=q_max)
    return TriSeries(slices, 1, t_max)


def chi10(trunc: TruncationSpec) -> TriSeries:
    """chi_10 exact for ``q <= q_max``, ``qt <= t_max``; complete in ``p``."""
    return _chi10(max(trunc.q_max, 1), max(trunc.t_max, 1))


@lru_cache(maxsize=None)
def _inv_chi10(q_max: int, t_max: int, p_target: int) -> TriSeries:
    f = _chi10(q_max + 2, t_max + 2)
    return f.inverse(t_max=t_max, q_max=q_max, p_high=p_target)


def _window_ok(f: TriSeries, trunc: TruncationSpec) -> bool:
    if f.t_high < trunc.t_max:
        return False
    for n in range(-1, trunc.t_max + 1):
        sl = f.slice(n)
        if sl.q_high < trunc.q_max or sl.min_p_high(trunc.q_max) < trunc.p_window:
            return False
    return True


def inv_chi10(trunc: TruncationSpec) -> TriSeries:
    """``1/chi_10`` exact on ``qt <= t_max``, ``q <= q_max``, ``p <= p_window``.

    The internal p target is doubled until the requested region is covered.
    """
    q_max = max(trunc.q_max, -1)
    margin = _P_MARGIN
    for _ in range(_MAX_DOUBLINGS):
        f = _inv_chi10(q_max, trunc.t_max, trunc.p_window + margin)
        if _window_ok(f, trunc):
            return f
        margin *= 2
    raise InsufficientTruncation("could not certify the inverse of chi_10", trunc)


def dt_series(n: int, trunc: TruncationSpec) -> QSeries:
    """``DT_n(p, q)``: the ``qt^(n-1)`` slice of ``-1/chi_10``.

    The coefficient of ``q^(h-1) p^m`` is ``(-1)^m DT_{m,(beta_h,n)}``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    inv = inv_chi10(TruncationSpec(trunc.q_max, n - 1, trunc.p_window))
    return -inv.slice(n - 1)


@dataclass
class IgusaTable:
    """Certified coefficients ``c(h, n, m)`` of ``1/chi_10``.

    ``entries`` holds every nonzero coefficient with ``-1 <= h <= q_max``,
    ``-1 <= n <= t_max`` and ``m <= p_window``; any other triple in that box is
    zero.  Triples with ``h < -1`` or ``n < -1`` are zero by the pole order.
    """

    entries: Dict[Tuple[int, int, int], Fraction]
    trunc: TruncationSpec
    convention_tag: str = CONVENTION_TAG

    @classmethod
    def build(cls, trunc: TruncationSpec) -> "IgusaTable":
        inv = inv_chi10(trunc)
        entries = {}
        for n in range(-1, trunc.t_max + 1):
            sl = inv.slice(n)
            for (h, m), v in sl.to_dict(p_max=trunc.p_window).items():
                if h <= trunc.q_max:
                    entries[(h, n, m)] = Fraction(v)
        return cls(entries, trunc)

    def certifies(self, h: int, n: int, m: int) -> bool:
        return h <= self.trunc.q_max and n <= self.trunc.t_max and m <= self.trunc.p_window

    def lookup(self, h: int, n: int, m: int) -> Tuple[Fraction, str]:
        """Return ``(c(h, n, m), certificate)``."""
        if h < -1 or n < -1:
            return Fraction(0), "pole bound"
        if not self.certifies(h, n, m):
            raise InsufficientTruncation(
                f"c({h}, {n}, {m}) lies outside the certified region {self.trunc.as_dict()}",
                self.trunc.union(TruncationSpec(max(h, -1), max(n, -1), max(m, 0))),
            )
        return self.entries.get((h, n, m), Fraction(0)), "table"

    def __getitem__(self, key: Tuple[int, int, int]) -> Fraction:
        return self.lookup(*key)[0]

    def extend(self, trunc: TruncationSpec) -> "IgusaTable":
        """Table over the union region; previously certified entries must survive."""
        if self.trunc.covers(trunc):
            return self
        new = IgusaTable.build(self.trunc.union(trunc))
        for (h, n, m) in set(self.entries) | set(k for k in new.entries if self.certifies(*k)):
            if self.entries.get((h, n, m), 0) != new.entries.get((h, n, m), 0):
                raise CertificateError(f"certified coefficient c({h}, {n}, {m}) changed on extension")
        return new


def igusa_c(h: int, n: int, m: int, table: IgusaTable) -> Fraction:
    return table.lookup(h, n, m)[0]
