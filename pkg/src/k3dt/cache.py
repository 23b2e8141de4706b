"""Exact table serialization (JSON / CSV) and the persistent coefficient cache."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .igusa import CONVENTION_TAG, IgusaTable, JacobiCoeffTable, jacobi_table
from .series import INF, QSeries, TruncationSpec

FORMAT_VERSION = 1


class CacheError(RuntimeError):
    """Cache file is unreadable, corrupted or was written under other conventions."""


def format_rational(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    num, sep, den = text.partition("/")
    try:
        if not sep:
            return Fraction(int(num))
        d = int(den)
        if d <= 0:
            raise ValueError
        return Fraction(int(num), d)
    except ValueError:
        raise ValueError(f"not an exact rational: {text!r}") from None


def _bound(x):
    return None if x == INF else int(x)


@dataclass
class Table:
    """Rows ``exponents -> value`` plus the metadata every emission carries."""

    exponent_names: Tuple[str, ...]
    rows: List[Tuple[Tuple[int, ...], Fraction]]
    query: dict = field(default_factory=dict)
    trunc_certificate: dict = field(default_factory=dict)
    convention_tag: str = CONVENTION_TAG
    version: int = FORMAT_VERSION
    windows: Optional[List[dict]] = None
    metadata: Optional[dict] = None

    def values(self) -> Dict[Tuple[int, ...], Fraction]:
        return {e: v for e, v in self.rows}

    def to_json(self) -> str:
        doc = {
            "version": self.version,
            "convention_tag": self.convention_tag,
            "query": self.query,
            "trunc_certificate": self.trunc_certificate,
            "exponent_names": list(self.exponent_names),
            "rows": [{"exponents": list(e), "value": format_rational(v)} for e, v in self.rows],
        }
        if self.windows is not None:
            doc["windows"] = self.windows
        if self.metadata is not None:
            doc["metadata"] = self.metadata
        return json.dumps(doc, indent=1) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(self.exponent_names) + ["value"])
        for e, v in self.rows:
            w.writerow([str(x) for x in e] + [format_rational(v)])
        return buf.getvalue()

    @classmethod
    def from_json(cls, text: str) -> "Table":
        doc = json.loads(text)
        rows = [(tuple(r["exponents"]), parse_rational(r["value"])) for r in doc["rows"]]
        return cls(
            tuple(doc["exponent_names"]),
            rows,
            doc.get("query", {}),
            doc.get("trunc_certificate", {}),
            doc["convention_tag"],
            doc["version"],
            doc.get("windows"),
            doc.get("metadata"),
        )

    @classmethod
    def from_csv(cls, text: str) -> "Table":
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if not header or header[-1] != "value":
            raise ValueError("CSV header must end with a 'value' column")
        rows = [(tuple(int(x) for x in r[:-1]), parse_rational(r[-1])) for r in reader if r]
        return cls(tuple(header[:-1]), rows)


def qseries_table(f: QSeries, q_max: int, p_window: int, query: dict, trunc: TruncationSpec,
                  names: Sequence[str] = ("q", "p")) -> Table:
    """Tabulate the exact coefficients of ``f`` with ``q <= q_max``, ``p <= p_window``."""
    rows = []
    windows = []
    lo = f.q_low if f.q_low != INF else q_max + 1
    for j in range(int(lo), q_max + 1):
        sl = f.slice(j)
        windows.append({"q": j, "p_low": _bound(sl.low), "p_high": _bound(sl.high)})
        for k, v in sl.items():
            if k <= p_window:
                rows.append(((j, k), Fraction(v)))
    return Table(tuple(names), rows, query, trunc.as_dict(), windows=windows)


def pure_q_table(f: QSeries, q_max: int, query: dict, trunc: TruncationSpec, name="q") -> Table:
    rows = []
    lo = f.q_low if f.q_low != INF else q_max + 1
    for j in range(int(lo), q_max + 1):
        v = f.coeff(j, 0)
        if v:
            rows.append(((j,), v))
    return Table((name,), rows, query, trunc.as_dict())


# cache file ------------------------------------------------------------------

def _payload(phi: JacobiCoeffTable, igusa: IgusaTable) -> dict:
    return {
        "phi_table": {
            "a_max": phi.a_max,
            "rows": [
                {"exponents": list(k), "value": format_rational(v)} for k, v in sorted(phi.entries.items())
            ],
        },
        "igusa_table": {
            "rows": [
                {"exponents": list(k), "value": format_rational(v)} for k, v in sorted(igusa.entries.items())
            ],
        },
        "trunc_certificate": igusa.trunc.as_dict(),
    }


def _checksum(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


@dataclass
class CacheFile:
    phi_table: JacobiCoeffTable
    igusa_table: IgusaTable
    version: int = FORMAT_VERSION
    convention_tag: str = CONVENTION_TAG

    @property
    def trunc_certificate(self) -> TruncationSpec:
        return self.igusa_table.trunc

    @classmethod
    def build(cls, trunc: TruncationSpec) -> "CacheFile":
        table = IgusaTable.build(trunc)
        return cls(jacobi_table(max((trunc.q_max + 2) * (trunc.t_max + 2), 1)), table)

    def extended(self, trunc: TruncationSpec) -> "CacheFile":
        if self.trunc_certificate.covers(trunc):
            return self
        table = self.igusa_table.extend(trunc)
        t = table.trunc
        return CacheFile(jacobi_table(max((t.q_max + 2) * (t.t_max + 2), 1)), table)

    def dumps(self) -> str:
        payload = _payload(self.phi_table, self.igusa_table)
        doc = {"version": self.version, "convention_tag": self.convention_tag}
        doc.update(payload)
        doc["checksum"] = _checksum(payload)
        return json.dumps(doc, indent=1) + "\n"

    def save(self, path) -> None:
        """Atomic: write a sibling temp file, then rename over ``path``."""
        path = os.fspath(path)
        directory = os.path.dirname(os.path.abspath(path))
        fd, tmp = tempfile.mkstemp(prefix=".k3dt-cache-", dir=directory)
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(self.dumps())
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    @classmethod
    def loads(cls, text: str) -> "CacheFile":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CacheError(f"cache is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise CacheError("cache root must be an object")
        if doc.get("version") != FORMAT_VERSION:
            raise CacheError(f"cache version {doc.get('version')!r} != {FORMAT_VERSION}")
        if doc.get("convention_tag") != CONVENTION_TAG:
            raise CacheError(f"cache convention {doc.get('convention_tag')!r} != {CONVENTION_TAG!r}")
        try:
            payload = {k: doc[k] for k in ("phi_table", "igusa_table", "trunc_certificate")}
        except KeyError as exc:
            raise CacheError(f"cache is missing {exc}") from None
        if doc.get("checksum") != _checksum(payload):
            raise CacheError("cache checksum mismatch: file is corrupted")
        try:
            trunc = TruncationSpec(**payload["trunc_certificate"])
            phi = JacobiCoeffTable(
                {tuple(r["exponents"]): parse_rational(r["value"]) for r in payload["phi_table"]["rows"]},
                payload["phi_table"]["a_max"],
            )
            entries = {
                tuple(r["exponents"]): parse_rational(r["value"]) for r in payload["igusa_table"]["rows"]
            }
        except (KeyError, TypeError, ValueError) as exc:
            raise CacheError(f"malformed cache payload: {exc}") from None
        return cls(phi, IgusaTable(entries, trunc))

    @classmethod
    def load(cls, path) -> "CacheFile":
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise CacheError(f"cannot read cache {path}: {exc}") from None
        return cls.loads(text)


def load_or_build(path, trunc: TruncationSpec) -> Tuple[CacheFile, bool]:
    """Return a cache covering ``trunc`` and whether it had to be (re)written."""
    if path is not None and os.path.exists(path):
        cache = CacheFile.load(path)
        if cache.trunc_certificate.covers(trunc):
            return cache, False
        cache = cache.extended(trunc)
    else:
        cache = CacheFile.build(trunc)
    if path is not None:
        cache.save(path)
    return cache, True
