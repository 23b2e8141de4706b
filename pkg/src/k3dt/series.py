"""Exact Laurent series in up to three variables with exactness windows.

Three nested levels are provided:

``PLaurent``
    A Laurent polynomial slice in ``p`` together with a window ``[low, high]``.
    No nonzero coefficient of the true series lies below ``low``; every
    coefficient in ``[low, high]`` is exact; above ``high`` nothing is known.
``QSeries``
    A Laurent series in ``q`` whose coefficients are ``PLaurent`` slices.
``TriSeries``
    A Laurent series in ``qt`` (the second modular variable) whose
    coefficients are ``QSeries``.

``high`` may be ``INF`` for objects that are known completely (for example a
Laurent polynomial such as ``p - 2 + 1/p``).  All values are immutable.
Coefficients are Python ``int`` or ``fractions.Fraction``; integral fractions
are stored as ``int`` to keep the convolution kernels fast.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterator, Mapping, Optional, Tuple

INF = math.inf

__all__ = [
    "INF",
    "InsufficientTruncation",
    "NotInvertible",
    "PLaurent",
    "QSeries",
    "TriSeries",
    "TruncationSpec",
    "eta_power",
    "log_derivative_sq",
    "mul",
    "invert",
    "p_scale_derivative",
    "product_substitute_24",
    "tri_invert",
    "tri_mul",
]


@dataclass(frozen=True, order=True)
class TruncationSpec:
    """Requested exactness region.

    ``q_max`` and ``t_max`` are the largest exponents of ``q`` and ``qt`` that
    must be exact, ``p_window`` the largest ``p`` exponent (everything below a
    slice's lower bound is exact automatically).
    """

    q_max: int
    t_max: int = 0
    p_window: int = 8

    def __post_init__(self):
        for name in ("q_max", "t_max", "p_window"):
            if not isinstance(getattr(self, name), int):
                raise TypeError(f"{name} must be an integer")
        if self.q_max < -1 or self.t_max < -1:
            raise ValueError("truncation below the pole order -1 is meaningless")
        if self.p_window < 0:
            raise ValueError("p_window must be non-negative")

    def union(self, other: "TruncationSpec") -> "TruncationSpec":
        return TruncationSpec(
            max(self.q_max, other.q_max),
            max(self.t_max, other.t_max),
            max(self.p_window, other.p_window),
        )

    def covers(self, other: "TruncationSpec") -> bool:
        return (
            self.q_max >= other.q_max
            and self.t_max >= other.t_max
            and self.p_window >= other.p_window
        )

    def as_dict(self) -> dict:
        return {"q_max": self.q_max, "t_max": self.t_max, "p_window": self.p_window}


class InsufficientTruncation(ArithmeticError):
    """A coefficient outside the exact window was requested.

    ``needed`` is a truncation under which the query would be answerable (as
    far as the raising layer can tell).
    """

    def __init__(self, message: str, needed: Optional[TruncationSpec] = None):
        super().__init__(message)
        self.needed = needed


class NotInvertible(ArithmeticError):
    pass


def _clean(value):
    # integral Fractions are demoted to int
    if value.denominator == 1:
        return value.numerator
    return value


def _as_rational(value):
    if isinstance(value, Rational):
        return _clean(value)
    raise TypeError(f"exact rational expected, got {type(value).__name__}")


def _window_min(a, b):
    return a if a <= b else b


class PLaurent:
    """Laurent polynomial slice in ``p`` with an exactness window."""

    __slots__ = ("_c", "low", "high")

    def __init__(self, coeffs: Mapping[int, Rational], low=None, high=INF):
        c = {}
        for k, v in coeffs.items():
            if v and k <= high:
                c[k] = _clean(v)
        if low is None:
            low = min(c) if c else (high + 1 if high != INF else INF)
        elif c and min(c) < low:
            raise ValueError("stored exponent below exact_low")
        # everything between low and the first nonzero exponent is a known zero
        if c:
            low = min(c)
        elif high != INF:
            low = max(low, high + 1)
        else:
            low = INF
        self._c = c
        self.low = low
        self.high = high

    @classmethod
    def zero(cls) -> "PLaurent":
        return cls({}, INF, INF)

    @classmethod
    def one(cls) -> "PLaurent":
        return cls({0: 1})

    @classmethod
    def monomial(cls, exponent: int, value=1) -> "PLaurent":
        return cls({exponent: value})

    @property
    def is_zero(self) -> bool:
        """True only for the exactly-known zero slice."""
        return self.low == INF

    @property
    def exact_low(self):
        return self.low

    @property
    def exact_high(self):
        return self.high

    def items(self) -> Iterator[Tuple[int, Rational]]:
        return iter(sorted(self._c.items()))

    def __getitem__(self, k: int):
        if k < self.low:
            return 0
        if k > self.high:
            raise InsufficientTruncation(
                f"p^{k} is outside the exact window [{self.low}, {self.high}]"
            )
        return self._c.get(k, 0)

    def __eq__(self, other):
        if not isinstance(other, PLaurent):
            return NotImplemented
        return (self._c, self.low, self.high) == (other._c, other.low, other.high)

    def __hash__(self):
        return hash((tuple(sorted(self._c.items())), self.low, self.high))

    def __repr__(self):
        terms = " + ".join(f"{v}*p^{k}" for k, v in self.items()) or "0"
        return f"PLaurent({terms}; [{self.low}, {self.high}])"

    def __neg__(self):
        return PLaurent({k: -v for k, v in self._c.items()}, self.low, self.high)

    def __add__(self, other):
        if not isinstance(other, PLaurent):
            if isinstance(other, Rational):
                other = PLaurent({0: other})
            else:
                return NotImplemented
        high = _window_min(self.high, other.high)
        c = dict(self._c)
        for k, v in other._c.items():
            c[k] = c.get(k, 0) + v
        return PLaurent(c, min(self.low, other.low), high)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor) -> "PLaurent":
        factor = _as_rational(factor)
        if not factor:
            return PLaurent({}, self.low, self.high)
        return PLaurent({k: v * factor for k, v in self._c.items()}, self.low, self.high)

    def __mul__(self, other):
        if isinstance(other, Rational):
            return self.scale(other)
        if not isinstance(other, PLaurent):
            return NotImplemented
        low = self.low + other.low
        high = _window_min(self.low + other.high, other.low + self.high)
        if low == INF:
            return PLaurent.zero() if high == INF else PLaurent({}, low, high)
        a_items = sorted(self._c.items())
        b_items = sorted(other._c.items())
        acc: Dict[int, Rational] = {}
        get = acc.get
        for i, x in a_items:
            lim = high - i
            for j, y in b_items:
                if j > lim:
                    break
                k = i + j
                acc[k] = get(k, 0) + x * y
        return PLaurent(acc, low, high)

    __rmul__ = __mul__

    def truncate(self, high) -> "PLaurent":
        """Forget everything above ``p^high``."""
        return PLaurent(self._c, self.low, _window_min(self.high, high))

    def shift(self, n: int) -> "PLaurent":
        """Multiply by ``p**n``."""
        return PLaurent({k + n: v for k, v in self._c.items()}, self.low + n, self.high + n)

    def p_scale_derivative(self) -> "PLaurent":
        return PLaurent({k: k * v for k, v in self._c.items()}, self.low, self.high)

    def inverse(self, high=None) -> "PLaurent":
        """Inverse expanded in ascending powers of ``p``.

        ``high`` caps the exact window of the result and is required when the
        slice itself is known completely.
        """
        if not self._c:
            raise NotInvertible("not invertible at this truncation: slice has no known nonzero term")
        lead = self.low
        if len(self._c) == 1 and self.high == INF:
            return PLaurent({-lead: _clean(Fraction(1) / self._c[lead])})
        out_low = -lead
        out_high = -lead + (self.high - lead)
        if high is not None:
            out_high = _window_min(out_high, high)
        if out_high == INF:
            raise ValueError("a target exponent is required to invert a complete slice")
        a0 = self._c[lead]
        inv_a0 = Fraction(1, 1) / a0
        inv_a0 = _clean(inv_a0)
        rel = [(k - lead, v) for k, v in sorted(self._c.items()) if k != lead]
        n = out_high - out_low
        b = [inv_a0]
        for k in range(1, n + 1):
            s = 0
            for i, ai in rel:
                if i > k:
                    break
                s += ai * b[k - i]
            b.append(_clean(Fraction(-s) * inv_a0) if s else 0)
        return PLaurent({out_low + k: v for k, v in enumerate(b)}, out_low, out_high)


class _Graded:
    """Laurent series in one variable over a ring of slices.

    Slices that are absent from storage but lie inside ``[low, high]`` are
    exactly zero.  Slices with partial knowledge are always stored.
    """

    __slots__ = ("_s", "low", "high")
    _slice_type: type = PLaurent
    _var = "x"

    def __init__(self, slices: Mapping[int, object], low=None, high=INF):
        s = {}
        for k, v in slices.items():
            if k <= high and not v.is_zero:
                s[k] = v
        if low is None:
            low = min(s) if s else (high + 1 if high != INF else INF)
        elif s and min(s) < low:
            raise ValueError(f"stored {self._var}-exponent below the lower bound")
        if s:
            low = min(s)
        elif high != INF:
            low = max(low, high + 1)
        else:
            low = INF
        self._s = s
        self.low = low
        self.high = high

    # construction helpers
    @classmethod
    def zero(cls):
        return cls({}, INF, INF)

    @classmethod
    def one(cls):
        return cls({0: cls._slice_type.one()})

    @classmethod
    def constant(cls, slice_value, exponent: int = 0, high=INF):
        return cls({exponent: slice_value}, exponent, high)

    @property
    def is_zero(self) -> bool:
        return self.low == INF

    def slice(self, k: int):
        if k < self.low:
            return self._slice_type.zero()
        if k > self.high:
            raise InsufficientTruncation(
                f"{self._var}^{k} is outside the exact range [{self.low}, {self.high}]"
            )
        return self._s.get(k, self._slice_type.zero())

    __getitem__ = slice

    def exponents(self):
        return sorted(self._s)

    def items(self):
        return iter(sorted(self._s.items()))

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return (self._s, self.low, self.high) == (other._s, other.low, other.high)

    def __hash__(self):
        return hash((tuple(sorted(self._s.items())), self.low, self.high))

    def __repr__(self):
        return f"{type(self).__name__}({self._var}-range [{self.low}, {self.high}], {len(self._s)} slices)"

    def __neg__(self):
        return type(self)({k: -v for k, v in self._s.items()}, self.low, self.high)

    def _coerce(self, other):
        if isinstance(other, type(self)):
            return other
        if isinstance(other, (Rational, self._slice_type)):
            return type(self)({0: self._slice_type.one() * other})
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        high = _window_min(self.high, other.high)
        s = dict(self._s)
        for k, v in other._s.items():
            s[k] = s[k] + v if k in s else v
        return type(self)(s, min(self.low, other.low), high)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor):
        return type(self)({k: v.scale(factor) for k, v in self._s.items()}, self.low, self.high)

    def __mul__(self, other):
        if isinstance(other, Rational):
            return self.scale(other)
        if not isinstance(other, type(self)):
            return NotImplemented
        low = self.low + other.low
        high = _window_min(self.low + other.high, other.low + self.high)
        if low == INF:
            return type(self).zero() if high == INF else type(self)({}, low, high)
        acc = {}
        for i, a in sorted(self._s.items()):
            for j, b in sorted(other._s.items()):
                k = i + j
                if k > high:
                    break
                term = a * b
                acc[k] = acc[k] + term if k in acc else term
        return type(self)(acc, low, high)

    __rmul__ = __mul__

    def shift(self, n: int):
        return type(self)({k + n: v for k, v in self._s.items()}, self.low + n, self.high + n)

    def truncate(self, high: int):
        """Forget everything above ``high``."""
        return type(self)(self._s, self.low, _window_min(self.high, high))

    def map_slices(self, fn):
        return type(self)({k: fn(v) for k, v in self._s.items()}, self.low, self.high)

    def _inverse(self, high, inner: dict):
        if self.low == INF or self.low not in self._s:
            raise NotInvertible("not invertible at this truncation: leading slice unknown")
        v = self.low
        lead = self._s[v]
        out_low = -v
        out_high = -v + (self.high - v)
        if high is not None:
            out_high = _window_min(out_high, high)
        if out_high == INF:
            raise ValueError(f"a target {self._var}-exponent is required to invert a complete series")
        g0 = lead.inverse(**inner)
        out = {out_low: g0}
        for k in range(1, out_high - out_low + 1):
            acc = None
            for i in range(1, k + 1):
                fi = self._s.get(v + i)
                if fi is None:
                    continue
                gj = out.get(out_low + k - i)
                if gj is None:
                    continue
                term = fi * gj
                acc = term if acc is None else acc + term
            if acc is not None:
                res = -(g0 * acc)
                if not res.is_zero:
                    out[out_low + k] = res
        return type(self)(out, out_low, out_high)


class QSeries(_Graded):
    """Laurent series in ``q`` with ``PLaurent`` coefficients."""

    __slots__ = ()
    _slice_type = PLaurent
    _var = "q"

    @property
    def q_low(self):
        return self.low

    @property
    def q_high(self):
        return self.high

    @classmethod
    def from_q_coeffs(cls, coeffs: Mapping[int, Rational], high=INF):
        """Pure q-series (p-exponent 0 only); complete in ``p``."""
        return cls({k: PLaurent({0: v}) for k, v in coeffs.items() if v}, None, high)

    @classmethod
    def from_dict(cls, coeffs: Mapping[Tuple[int, int], Rational], q_high=INF, p_high=INF):
        """Build from ``{(q_exp, p_exp): value}``; every slice gets ``p_high``."""
        rows: Dict[int, Dict[int, Rational]] = {}
        for (j, k), v in coeffs.items():
            rows.setdefault(j, {})[k] = v
        slices = {j: PLaurent(r, None, p_high) for j, r in rows.items()}
        low = min(rows, default=INF)
        return cls(slices, low, q_high)

    def coeff(self, j: int, k: int):
        if j > self.high:
            raise InsufficientTruncation(
                f"q^{j} is beyond the exact q-range (<= {self.high})",
                TruncationSpec(q_max=max(j, -1), p_window=max(k, 0)),
            )
        try:
            return Fraction(self.slice(j)[k])
        except InsufficientTruncation as exc:
            raise InsufficientTruncation(
                f"coefficient q^{j} p^{k}: {exc}", TruncationSpec(q_max=max(j, -1), p_window=max(k, 0))
            ) from None

    def to_dict(self, p_max=None) -> Dict[Tuple[int, int], Rational]:
        out = {}
        for j, sl in self._s.items():
            for k, v in sl.items():
                if p_max is None or k <= p_max:
                    out[(j, k)] = v
        return out

    def p_scale_derivative(self) -> "QSeries":
        return self.map_slices(PLaurent.p_scale_derivative)

    def p_truncate(self, high) -> "QSeries":
        return self.map_slices(lambda s: s.truncate(high))

    def p_shift(self, n: int) -> "QSeries":
        return self.map_slices(lambda s: s.shift(n))

    def min_p_high(self, q_max: int):
        """Smallest exact ``p`` bound over the slices ``q <= q_max``."""
        if q_max > self.high:
            return -INF
        return min((sl.high for j, sl in self._s.items() if j <= q_max), default=INF)

    def inverse(self, q_max=None, p_high=None) -> "QSeries":
        return self._inverse(q_max, {"high": p_high})



class TriSeries(_Graded):
    """Laurent series in ``qt`` with ``QSeries`` coefficients."""

    __slots__ = ()
    _slice_type = QSeries
    _var = "qt"

    @property
    def t_low(self):
        return self.low

    @property
    def t_high(self):
        return self.high

    def coeff(self, n: int, j: int, k: int):
        if n > self.high:
            raise InsufficientTruncation(
                f"qt^{n} is beyond the exact qt-range (<= {self.high})",
                TruncationSpec(q_max=max(j, -1), t_max=max(n, -1), p_window=max(k, 0)),
            )
        try:
            return self.slice(n).coeff(j, k)
        except InsufficientTruncation as exc:
            raise InsufficientTruncation(
                f"coefficient qt^{n}: {exc}",
                TruncationSpec(q_max=max(j, -1), t_max=max(n, -1), p_window=max(k, 0)),
            ) from None

    def inverse(self, t_max=None, q_max=None, p_high=None) -> "TriSeries":
        return self._inverse(t_max, {"q_max": q_max, "p_high": p_high})



# functional surface ----------------------------------------------------------

def mul(f: QSeries, g: QSeries) -> QSeries:
    return f * g


def invert(f: QSeries, q_max=None, p_high=None) -> QSeries:
    """Multiplicative inverse; leading slice expanded in ascending ``p``."""
    return f.inverse(q_max=q_max, p_high=p_high)


def p_scale_derivative(f: QSeries) -> QSeries:
    return f.p_scale_derivative()


def log_derivative_sq(f: QSeries, q_max=None, p_high=None) -> QSeries:
    """``(1/2) (p d/dp)^2 log f``, computed as ``(1/2) (p d/dp)[(p df/dp) / f]``.

    With ``f = Theta^2`` this is ``(p d/dp)^2 log Theta`` without ever forming
    half-integral powers of ``p``.
    """
    ratio = f.p_scale_derivative() * f.inverse(q_max=q_max, p_high=p_high)
    return ratio.p_scale_derivative().scale(Fraction(1, 2))


def tri_mul(f: TriSeries, g: TriSeries) -> TriSeries:
    return f * g


def tri_invert(f: TriSeries, t_max=None, q_max=None, p_high=None) -> TriSeries:
    return f.inverse(t_max=t_max, q_max=q_max, p_high=p_high)


def eta_power_coeffs(exponent: int, q_max: int) -> list:
    """Coefficients of ``prod_{n>=1} (1 - q^n)^exponent`` up to ``q^q_max``."""
    out = [0] * (q_max + 1)
    if q_max < 0:
        return []
    out[0] = 1
    e = exponent
    for n in range(1, q_max + 1):
        # factor (1 - q^n)^e as a binomial series in q^n
        terms = []
        k = 1
        while k * n <= q_max:
            if e >= 0:
                c = math.comb(e, k) * (-1) ** k
            else:
                c = math.comb(-e + k - 1, k)
            if c:
                terms.append((k * n, c))
            k += 1
        if not terms:
            continue
        new = out[:]
        for j in range(q_max + 1):
            a = out[j]
            if not a:
                continue
            for d, c in terms:
                if j + d > q_max:
                    break
                new[j + d] += a * c
        out = new
    return out


def eta_power(exponent: int, trunc: TruncationSpec) -> QSeries:
    """``prod_{n>=1} (1 - q^n)^exponent`` exact to ``q^trunc.q_max``; complete in ``p``."""
    coeffs = eta_power_coeffs(exponent, trunc.q_max)
    return QSeries({j: PLaurent({0: c}) for j, c in enumerate(coeffs) if c}, 0, trunc.q_max)


def product_substitute_24(x: TriSeries, trunc: TruncationSpec) -> TriSeries:
    """``prod_{n>=1} (1 - x^n)^(-24)`` for ``x`` of positive ``qt``-valuation.

    Each factor is expanded as the binomial series ``sum_k C(23+k, k) x^(nk)``;
    only factors with ``n * t_low <= t_max`` contribute.
    """
    if x.is_zero:
        return TriSeries.one().truncate(trunc.t_max)
    if x.t_low <= 0:
        raise ValueError("substitution does not converge formally: x needs positive qt-valuation")
    t_max = trunc.t_max
    x = x.truncate(t_max)
    one = TriSeries.one()
    result = one.truncate(t_max)
    x_pow = one
    n = 1
    while n * x.t_low <= t_max:
        x_pow = (x_pow * x).truncate(t_max)  # x^n
        factor = one
        y_pow = one
        k = 1
        while k * n * x.t_low <= t_max:
            y_pow = (y_pow * x_pow).truncate(t_max)
            factor = factor + y_pow.scale(math.comb(23 + k, k))
            k += 1
        result = (result * factor.truncate(t_max)).truncate(t_max)
        n += 1
    return result
