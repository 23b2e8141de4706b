"""Exact generating series for reduced DT / GW / Quot theory of K3 geometries."""
from .series import (
    InsufficientTruncation,
    NotInvertible,
    PLaurent,
    QSeries,
    TriSeries,
    TruncationSpec,
)

__version__ = "0.1.0"

__all__ = [
    "InsufficientTruncation",
    "NotInvertible",
    "PLaurent",
    "QSeries",
    "TriSeries",
    "TruncationSpec",
]
