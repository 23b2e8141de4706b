"""Runnable identity checks.

Each suite compares two independently assembled objects coefficient by
coefficient on a stated region and reports the first mismatch.
"""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, Optional, Tuple

from . import forms, igusa, theory
from .series import InsufficientTruncation, QSeries, TruncationSpec


@dataclass
class CheckResult:
    name: str
    region: dict
    passed: bool
    checked: int = 0
    first_difference: Optional[dict] = None
    error: Optional[str] = None
    seconds: float = 0.0

    def as_dict(self) -> dict:
        return asdict(self)


class _Mismatch(Exception):
    def __init__(self, where: dict):
        self.where = where


def naive_eta_product(exponent: int, q_max: int) -> Dict[int, int]:
    """``prod (1 - q^n)^exponent`` by multiplying one linear factor at a time."""
    poly = {0: 1}
    for n in range(1, q_max + 1):
        for _ in range(abs(exponent)):
            new = dict(poly)
            if exponent > 0:
                for j, v in poly.items():
                    if j + n <= q_max:
                        new[j + n] = new.get(j + n, 0) - v
            else:
                # divide by (1 - q^n): running sum with stride n
                for j in range(n, q_max + 1):
                    new[j] = new.get(j, 0) + new.get(j - n, 0)
            poly = {j: v for j, v in new.items() if v}
    return poly


def _compare_q(a: QSeries, b: QSeries, qs: Iterable[int], ms: Iterable[int], tag="") -> int:
    ms = list(ms)
    count = 0
    for j in qs:
        for m in ms:
            x, y = a.coeff(j, m), b.coeff(j, m)
            count += 1
            if x != y:
                raise _Mismatch({"where": tag, "q": j, "p": m, "lhs": str(x), "rhs": str(y)})
    return count


def _window(w: int):
    return range(-w, w + 1)


# suites ------------------------------------------------------------------------

def check_eta(trunc: TruncationSpec) -> int:
    q_max = trunc.q_max
    d = forms.delta(TruncationSpec(q_max))
    oracle = {j + 1: v for j, v in naive_eta_product(24, q_max - 1).items()}
    count = 0
    for j in range(1, q_max + 1):
        count += 1
        if d.coeff(j, 0) != oracle.get(j, 0):
            raise _Mismatch({"q": j, "lhs": str(d.coeff(j, 0)), "rhs": str(oracle.get(j, 0))})
    return count


def check_weierstrass(trunc: TruncationSpec) -> int:
    lds = forms.log_derivative_sq_theta(trunc)
    total = lds + forms.wp(trunc) - forms.e2(trunc).scale(Fraction(1, 12))
    return _compare_q(total, QSeries.zero(), range(0, trunc.q_max + 1), _window(trunc.p_window))


def check_kkv(trunc: TruncationSpec) -> int:
    t = TruncationSpec(trunc.q_max, -1, trunc.p_window)
    lhs = -igusa.inv_chi10(t).slice(-1)
    rhs = -theory.inv_theta_sq_delta(t)
    return _compare_q(lhs, rhs, range(-1, trunc.q_max + 1), _window(trunc.p_window))


def _inv_delta(q_max: int) -> QSeries:
    return forms.delta(TruncationSpec(q_max + 2)).inverse(q_max=q_max)


def check_dt1(trunc: TruncationSpec) -> int:
    t = TruncationSpec(trunc.q_max, 0, trunc.p_window)
    lhs = -igusa.inv_chi10(t).slice(0)
    rhs = (forms.wp(TruncationSpec(trunc.q_max + 1, 0, trunc.p_window)) * _inv_delta(trunc.q_max)).scale(-24)
    return _compare_q(lhs, rhs, range(-1, trunc.q_max + 1), _window(trunc.p_window))


def check_yau_zaslow(trunc: TruncationSpec) -> int:
    t = TruncationSpec(trunc.q_max, 0, trunc.p_window)
    lhs = igusa.dt_series(1, t) + theory.quot_series(1, t).scale(24)
    rhs = (forms.e2(TruncationSpec(trunc.q_max + 1)) * _inv_delta(trunc.q_max)).scale(-2)
    count = _compare_q(lhs, rhs, range(-1, trunc.q_max + 1), _window(trunc.p_window))
    # H_1 = gw_series(1) is p-free
    h1 = theory.gw_series(1, t)
    for j in range(-1, trunc.q_max + 1):
        for m in _window(trunc.p_window):
            if m and h1.coeff(j, m):
                raise _Mismatch({"where": "p-independence", "q": j, "p": m, "lhs": str(h1.coeff(j, m))})
    return count


def check_conjecture_a(trunc: TruncationSpec) -> int:
    report = theory.verify_conjecture_a(trunc)
    if not report.passed:
        n, h, m, x, y = report.first_difference
        raise _Mismatch({"qt": n, "q": h, "p": m, "lhs": str(x), "rhs": str(y)})
    return report.checked


def check_lift(trunc: TruncationSpec) -> int:
    a_max, w = trunc.q_max, trunc.p_window
    b_max = max(trunc.t_max, trunc.q_max)
    chi = igusa.chi10(TruncationSpec(max(a_max, b_max), max(a_max, b_max)))
    count = 0
    for a in range(1, a_max + 1):
        for b in range(1, b_max + 1):
            for l in _window(w):
                v = chi.coeff(b, a, l)
                count += 1
                checks = (
                    ("symmetry", chi.coeff(a, b, l)),
                    ("evenness", chi.coeff(b, a, -l)),
                )
                for what, other in checks:
                    if v != other:
                        raise _Mismatch({"where": what, "a": a, "l": l, "b": b, "lhs": str(v), "rhs": str(other)})
                if 4 * a * b < l * l and v:
                    raise _Mismatch({"where": "support", "a": a, "l": l, "b": b, "lhs": str(v), "rhs": "0"})
    return count


def check_jacobi_index(trunc: TruncationSpec) -> int:
    a_max = trunc.q_max
    phi = forms.phi_10_1(TruncationSpec(a_max))
    seen: Dict[int, Tuple[int, int, Fraction]] = {}
    count = 0
    for a in range(1, a_max + 1):
        for l in range(-(a + 2), a + 3):
            v = phi.coeff(a, l)
            count += 1
            disc = 4 * a - l * l
            if disc < 0 and v:
                raise _Mismatch({"a": a, "l": l, "lhs": str(v), "rhs": "0"})
            prev = seen.setdefault(disc, (a, l, v))
            if prev[2] != v:
                raise _Mismatch({"a": a, "l": l, "lhs": str(v), "rhs": str(prev[2]), "reference": prev[:2]})
    return count


def check_multiple_cover(trunc: TruncationSpec, table: Optional[igusa.IgusaTable] = None) -> int:
    h0_max, n_max, w = trunc.q_max, trunc.t_max, trunc.p_window
    need = TruncationSpec(h0_max - 1, n_max - 1, w)
    if table is None or not table.trunc.covers(need):
        table = igusa.IgusaTable.build(need) if table is None else table.extend(need)
    count = 0
    for n in range(0, n_max + 1):
        dt = igusa.dt_series(n, TruncationSpec(h0_max - 1, 0, w))
        for h0 in range(0, h0_max + 1):
            for m in _window(w):
                spec = theory.CurveClassSpec(1, h0, n, m)
                value = theory.dt_imprimitive(spec, table)
                relation = (-1) ** (m + 1) * igusa.igusa_c(h0 - 1, n - 1, m, table)
                from_series = (-1) ** m * dt.coeff(h0 - 1, m)
                count += 1
                if not value == relation == from_series:
                    raise _Mismatch({"h0": h0, "n": n, "m": m, "lhs": str(value),
                                     "rhs": str(relation), "series": str(from_series)})
    return count


def check_multiplicativity(trunc: TruncationSpec) -> int:
    w = trunc.p_window
    pw = w
    for _ in range(5):
        t = TruncationSpec(trunc.q_max + 1, 0, pw)
        lhs = theory.quot_series(2, t) * theory.quot_series(0, t)
        q1 = theory.quot_series(1, t)
        rhs = q1 * q1
        try:
            return _compare_q(lhs, rhs, range(-2, trunc.q_max + 1), _window(w))
        except InsufficientTruncation:
            pw = 2 * pw + 4
    raise InsufficientTruncation("multiplicativity check could not be certified", trunc)


SUITES: Dict[str, Tuple[Callable[..., int], TruncationSpec, str]] = {
    "eta": (check_eta, TruncationSpec(10, 0, 0), "A1 Delta against a naive product"),
    "weierstrass": (check_weierstrass, TruncationSpec(8, 0, 8), "A2 (p d/dp)^2 log Theta = -wp + E2/12"),
    "kkv": (check_kkv, TruncationSpec(8, -1, 8), "A3 DT_0 = -1/(Theta^2 Delta)"),
    "dt1": (check_dt1, TruncationSpec(6, 0, 8), "A4 DT_1 = -24 wp/Delta"),
    "yau-zaslow": (check_yau_zaslow, TruncationSpec(6, 0, 8), "A5 H_1 = -2 E2/Delta"),
    "conjecture-a": (check_conjecture_a, TruncationSpec(5, 4, 8), "A6 GW series vs -1/chi_10 + correction"),
    "lift": (check_lift, TruncationSpec(6, 6, 8), "A7 chi_10 symmetry, evenness, support"),
    "jacobi": (check_jacobi_index, TruncationSpec(10, 0, 0), "A8 phi_10_1 depends on 4a - l^2"),
    "multiple-cover": (check_multiple_cover, TruncationSpec(4, 3, 5), "A9 primitive multiple cover"),
    "multiplicativity": (check_multiplicativity, TruncationSpec(6, 0, 6), "A10 Q_2 Q_0 = Q_1^2"),
}


def run_suite(name: str, trunc: Optional[TruncationSpec] = None, **kwargs) -> CheckResult:
    fn, default, _ = SUITES[name]
    trunc = default if trunc is None else trunc
    start = time.perf_counter()
    result = CheckResult(name, trunc.as_dict(), False)
    try:
        result.checked = fn(trunc, **kwargs)
        result.passed = True
    except _Mismatch as exc:
        result.first_difference = exc.where
    except InsufficientTruncation as exc:
        result.error = f"insufficient truncation: {exc}"
    result.seconds = round(time.perf_counter() - start, 3)
    return result
