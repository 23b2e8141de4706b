"""The named modular and Jacobi objects: Delta, E2, Theta^2, G, wp, phi_{10,1}.

Every public builder takes a :class:`TruncationSpec` and returns a series
whose slices ``q <= trunc.q_max`` are exact at least up to ``p^trunc.p_window``.
Builders that involve an inversion internally work with a larger ``p`` target
and double it until the requested window is certified.
"""
from __future__ import annotations

import threading
from fractions import Fraction
from functools import lru_cache

from .series import (
    InsufficientTruncation,
    QSeries,
    TruncationSpec,
    eta_power,
    eta_power_coeffs,
    log_derivative_sq,
)

FORM_NAMES = ("delta", "e2", "theta2", "g", "wp", "phi101", "goettsche")

# initial slack for the internal p target; doubled on failure
_P_MARGIN = 8
_MAX_DOUBLINGS = 8


def certify(build, trunc: TruncationSpec, q_max=None):
    """Call ``build(p_target)`` with growing targets until the window holds.

    ``build`` must return a QSeries; the check is that every slice up to
    ``q_max`` (default ``trunc.q_max``) is exact through ``trunc.p_window``.
    """
    q_max = trunc.q_max if q_max is None else q_max
    margin = _P_MARGIN
    for _ in range(_MAX_DOUBLINGS):
        target = trunc.p_window + margin
        f = build(target)
        if f.q_high >= q_max and f.min_p_high(q_max) >= trunc.p_window:
            return f
        margin *= 2
    raise InsufficientTruncation(
        f"could not certify p-window {trunc.p_window} up to q^{q_max}", trunc
    )


# raw builders (cached on their integer arguments) -----------------------------

@lru_cache(maxsize=None)
def _delta(q_max: int) -> QSeries:
    return eta_power(24, TruncationSpec(max(q_max - 1, 0))).shift(1).truncate(q_max)


def sigma1(n: int) -> int:
    return sum(d for d in range(1, n + 1) if n % d == 0)


@lru_cache(maxsize=None)
def _e2(q_max: int) -> QSeries:
    coeffs = {0: 1}
    for n in range(1, q_max + 1):
        coeffs[n] = -24 * sigma1(n)
    return QSeries.from_q_coeffs(coeffs, q_max)


@lru_cache(maxsize=None)
def _theta_sq(q_max: int) -> QSeries:
    # (p - 2 + 1/p) * prod_m (1 - p q^m)^2 (1 - q^m/p)^2, then * prod (1-q^m)^-4
    poly = {(0, -1): 1, (0, 0): -2, (0, 1): 1}
    for m in range(1, q_max + 1):
        for sign in (1, -1):
            factor = {(0, 0): 1, (m, sign): -2, (2 * m, 2 * sign): 1}
            new = {}
            for (j, k), v in poly.items():
                for (dj, dk), w in factor.items():
                    if j + dj > q_max:
                        continue
                    key = (j + dj, k + dk)
                    new[key] = new.get(key, 0) + v * w
            poly = {key: v for key, v in new.items() if v}
    eta = eta_power_coeffs(-4, q_max)
    out = {}
    for (j, k), v in poly.items():
        for d, w in enumerate(eta[: q_max - j + 1]):
            if w:
                key = (j + d, k)
                out[key] = out.get(key, 0) + v * w
    return QSeries.from_dict({key: v for key, v in out.items() if v}, q_high=q_max)


@lru_cache(maxsize=None)
def _phi_10_1(q_max: int) -> QSeries:
    return (_theta_sq(q_max) * _delta(q_max)).truncate(q_max)


@lru_cache(maxsize=None)
def _lds_theta(q_max: int, p_target: int) -> QSeries:
    return log_derivative_sq(_theta_sq(q_max), q_max=q_max, p_high=p_target)


@lru_cache(maxsize=None)
def _g(q_max: int, p_target: int) -> QSeries:
    return -(_theta_sq(q_max) * _lds_theta(q_max, p_target))


@lru_cache(maxsize=None)
def _inv_theta_sq(q_max: int, p_target: int) -> QSeries:
    return _theta_sq(q_max).inverse(q_max=q_max, p_high=p_target)


@lru_cache(maxsize=None)
def _wp(q_max: int, p_target: int) -> QSeries:
    return _g(q_max, p_target) * _inv_theta_sq(q_max, p_target) + _e2(q_max).scale(Fraction(1, 12))


# public builders --------------------------------------------------------------

def delta(trunc: TruncationSpec) -> QSeries:
    """``q prod (1 - q^n)^24``."""
    if trunc.q_max < 1:
        raise ValueError("delta needs q_max >= 1")
    return _delta(trunc.q_max)


def e2(trunc: TruncationSpec) -> QSeries:
    """``1 - 24 sum sigma_1(n) q^n``."""
    return _e2(trunc.q_max)


def theta_sq(trunc: TruncationSpec) -> QSeries:
    """Theta squared; every q-slice is a complete Laurent polynomial in p."""
    return _theta_sq(max(trunc.q_max, 0))


def log_derivative_sq_theta(trunc: TruncationSpec) -> QSeries:
    q = max(trunc.q_max, 0)
    return certify(lambda P: _lds_theta(q, P), trunc)


def g_series(trunc: TruncationSpec) -> QSeries:
    """``G = -Theta^2 (p d/dp)^2 log Theta``."""
    q = max(trunc.q_max, 0)
    return certify(lambda P: _g(q, P), trunc)


def inv_theta_sq(trunc: TruncationSpec) -> QSeries:
    q = max(trunc.q_max, 0)
    return certify(lambda P: _inv_theta_sq(q, P), trunc)


def wp(trunc: TruncationSpec) -> QSeries:
    """Weierstrass function, defined as ``G / Theta^2 + E2 / 12``."""
    q = max(trunc.q_max, 0)
    return certify(lambda P: _wp(q, P), trunc)


def phi_10_1(trunc: TruncationSpec) -> QSeries:
    """The weight 10 index 1 Jacobi cusp form ``Theta^2 Delta``."""
    if trunc.q_max < 1:
        raise ValueError("phi_10_1 needs q_max >= 1")
    return _phi_10_1(trunc.q_max)


def goettsche_chi(n: int) -> Fraction:
    """Euler characteristic of the Hilbert scheme of ``n`` points on K3."""
    if n < 0:
        raise ValueError("Hilbert scheme of a negative number of points")
    return Fraction(eta_power_coeffs(-24, n)[n])


def goettsche_series(trunc: TruncationSpec) -> QSeries:
    return eta_power(-24, TruncationSpec(max(trunc.q_max, 0)))


_BUILDERS = {
    "delta": delta,
    "e2": e2,
    "theta2": theta_sq,
    "g": g_series,
    "wp": wp,
    "phi101": phi_10_1,
    "goettsche": goettsche_series,
}


class FormRegistry:
    """Cache of certified forms keyed by ``(name, trunc)``.

    Reads are lock-free; a miss computes outside the lock and the first
    writer wins, so concurrent callers always observe one value per key.
    """

    def __init__(self):
        self._cache = {}
        self._lock = threading.Lock()

    def get(self, name: str, trunc: TruncationSpec) -> QSeries:
        key = (name, trunc)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        try:
            builder = _BUILDERS[name]
        except KeyError:
            raise KeyError(f"unknown form {name!r}; expected one of {', '.join(FORM_NAMES)}") from None
        value = builder(trunc)
        with self._lock:
            return self._cache.setdefault(key, value)

    def __contains__(self, key) -> bool:
        return key in self._cache

    def __len__(self):
        return len(self._cache)

    def clear(self):
        with self._lock:
            self._cache.clear()


registry = FormRegistry()


def clear_caches():
    """Drop the memoised raw builders (not the registry)."""
    for fn in (_delta, _e2, _theta_sq, _phi_10_1, _lds_theta, _g, _inv_theta_sq, _wp):
        fn.cache_clear()


def build_form(name: str, trunc: TruncationSpec) -> QSeries:
    """Construct a named form from scratch, bypassing every cache."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise KeyError(f"unknown form {name!r}") from None
    clear_caches()
    return builder(trunc)
