"""Finite Gamma_m-approximations, the normalizing wrapper and the diagonalizer.

A finite table declares its last column to be the limit of each row.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import InputError, TableExhausted
from .gammaspace import (
    Coloring, GammaElem, compatible, elem_from_dict, elem_to_dict, interpret, is_valid, leq, lex_least,
    lt, over, zeta,
)


@dataclass
class ApproxTable:
    m: int
    rows: list  # rows[n][s]: GammaElem
    _report: Optional[list] = field(default=None, repr=False, compare=False)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def report(self) -> list[str]:
        if self._report is None:
            self._report = validate_table(self)
        return self._report

    def to_dict(self) -> dict:
        return {"m": self.m, "rows": [[elem_to_dict(g) for g in row] for row in self.rows]}

    @classmethod
    def from_dict(cls, d) -> "ApproxTable":
        try:
            return cls(int(d["m"]), [[elem_from_dict(g) for g in row] for row in d["rows"]])
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"malformed table: {e}") from e


def validate_table(t: ApproxTable) -> list[str]:
    out = []
    root = zeta(t.m)
    width = t.n_cols
    for n, row in enumerate(t.rows):
        if len(row) != width or not row:
            out.append(f"row {n} has {len(row)} cells, expected {width} > 0")
            continue
        for s, g in enumerate(row):
            if getattr(g, "level", None) != t.m or not is_valid(g):
                out.append(f"cell ({n},{s}) is not a valid element of level {t.m}")
        if out:
            continue
        if row[0] != root:
            out.append(f"cell ({n},0) is not the root")
        for s in range(1, width):
            if not leq(row[s - 1], row[s]):
                out.append(f"row {n} decreases at ({n},{s})")
        for s, g in enumerate(row):
            if not over(g, n):
                out.append(f"cell ({n},{s}) is not over {n}")
    return out


def limit(t: ApproxTable, n: int) -> GammaElem:
    rep = t.report()
    if rep:
        raise InputError(f"invalid table: {rep[0]}")
    if not 0 <= n < t.n_rows:
        raise InputError(f"row {n} out of range")
    return t.rows[n][-1]


@dataclass
class StepStream:
    """Grid of optional (value, stage) cells: the value of cell (n, s) becomes
    visible at its stage."""

    m: int
    rows: list  # rows[n][s]: None | (GammaElem, stage)

    @property
    def max_stage(self) -> int:
        return max((c[1] for row in self.rows for c in row if c is not None), default=0)

    @property
    def width(self) -> int:
        return max((len(r) for r in self.rows), default=0)

    def finals(self) -> list:
        return [row[-1][0] if row and row[-1] is not None else None for row in self.rows]

    @classmethod
    def from_table(cls, t: ApproxTable, stages: Optional[Sequence[Sequence[int]]] = None) -> "StepStream":
        rows = []
        for n, row in enumerate(t.rows):
            rows.append([(g, s if stages is None else stages[n][s]) for s, g in enumerate(row)])
        return cls(t.m, rows)

    def to_dict(self) -> dict:
        return {"m": self.m, "rows": [[None if c is None else {"value": elem_to_dict(c[0]), "stage": c[1]}
                                       for c in row] for row in self.rows]}

    @classmethod
    def from_dict(cls, d) -> "StepStream":
        try:
            rows = [[None if c is None else (elem_from_dict(c["value"]), int(c["stage"])) for c in row]
                    for row in d["rows"]]
            return cls(int(d["m"]), rows)
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"malformed stream: {e}") from e


def _usable(cell, m: int, n: int, t: int) -> bool:
    if cell is None:
        return False
    g, stage = cell
    return stage <= t and getattr(g, "level", None) == m and is_valid(g) and over(g, n)


def normalize(xi: StepStream, m: Optional[int] = None) -> ApproxTable:
    """Turn an arbitrary stream into a valid approximation.

    Row n starts at the root; at stage t it moves to the cell with the largest
    column s < t that is visible by stage t, over n, and strictly above the
    previous value, and otherwise stays put.
    """
    m = xi.m if m is None else m
    root = zeta(m)
    cols = max(xi.width, xi.max_stage) + 1
    rows = []
    for n, stream_row in enumerate(xi.rows):
        row = [root]
        for t in range(1, cols):
            prev = row[-1]
            pick = prev
            for s in range(min(t, len(stream_row)) - 1, -1, -1):
                cell = stream_row[s]
                if _usable(cell, m, n, t) and lt(prev, cell[0]):
                    pick = cell[0]
                    break
            row.append(pick)
        rows.append(row)
    out = ApproxTable(m, rows)
    assert not out.report(), out.report()
    return out


@dataclass(frozen=True)
class DisjointArray:
    rows: tuple  # rows[n] = (F_0, F_1, F_2) as frozensets

    @classmethod
    def of(cls, rows) -> "DisjointArray":
        return cls(tuple(tuple(frozenset(f) for f in row) for row in rows))

    def problems(self, k: int = 3) -> list[str]:
        out = []
        for n, row in enumerate(self.rows):
            if len(row) != k:
                out.append(f"row {n} has {len(row)} sets, expected {k}")
                continue
            for i in range(k):
                for j in range(i + 1, k):
                    if row[i] & row[j]:
                        out.append(f"row {n}: sets {i} and {j} intersect")
            union = frozenset().union(*row)
            if any(not isinstance(x, int) or x < 0 for x in union):
                out.append(f"row {n} holds a non-natural")
            elif union and min(union) <= n:
                out.append(f"row {n}: minimum {min(union)} is not above {n}")
        return out

    def to_dict(self) -> list:
        return [[sorted(f) for f in row] for row in self.rows]

    @classmethod
    def from_dict(cls, d) -> "DisjointArray":
        try:
            return cls.of([[[int(x) for x in f] for f in row] for row in d])
        except (TypeError, ValueError) as e:
            raise InputError(f"malformed array: {e}") from e


def from_array(arr: DisjointArray) -> ApproxTable:
    """Level-0 table with row n = (empty map, gamma_n) where gamma_n colors F_{n,j} with j."""
    bad = arr.problems()
    if bad:
        raise InputError(bad[0])
    rows = []
    for row in arr.rows:
        g = Coloring.of({x: j for j, f in enumerate(row) for x in f})
        rows.append([zeta(0), g])
    return ApproxTable(0, rows)


def hyperimmune_witness(f: str, arr: DisjointArray) -> Optional[int]:
    """Least row whose sets lie inside the prefix and inside the matching color classes."""
    for n, row in enumerate(arr.rows):
        if all(x < len(f) and int(f[x]) == j for j, fs in enumerate(row) for x in fs):
            return n
    return None


@dataclass
class Certificate:
    entries: list  # (table index, row, chosen coloring)

    def to_dict(self) -> list:
        return [{"table": i, "row": n, "tau": elem_to_dict(tau)} for i, n, tau in self.entries]


def diagonalize(tables: Sequence[ApproxTable]) -> tuple[str, Certificate]:
    """Meet every table in turn: read its limit at row |prefix| and copy the
    lex-least coloring it denotes into the prefix, padding gaps with 0."""
    for i, t in enumerate(tables):
        rep = t.report()
        if rep:
            raise InputError(f"table {i} is invalid: {rep[0]}")
    prefix = []
    entries = []
    for i, t in enumerate(tables):
        n = len(prefix)
        if n >= t.n_rows:
            raise TableExhausted(i, n)
        tau = lex_least(interpret(limit(t, n)))
        assert all(k > n for k in tau.support), "chosen coloring is not over the prefix length"
        if tau.support:
            prefix.extend([0] * (max(tau.support) + 1 - len(prefix)))
            for k, v in tau.items:
                prefix[k] = v
        entries.append((i, n, tau))
    word = "".join(map(str, prefix))
    cert = Certificate(entries)
    assert verify_certificate(word, tables, cert), "certificate does not re-verify"
    return word, cert


def verify_certificate(prefix: str, tables: Sequence[ApproxTable], cert: Certificate) -> bool:
    """Independent re-check: each recorded limit is compatible with the prefix."""
    if len(cert.entries) != len(tables):
        return False
    for i, n, tau in cert.entries:
        fs = interpret(limit(tables[i], n))
        if tau not in fs or not compatible(prefix, fs):
            return False
        if any(k >= len(prefix) or int(prefix[k]) != v for k, v in tau.items):
            return False
    return True


def dumps(obj) -> str:
    return json.dumps(obj.to_dict(), sort_keys=True, separators=(",", ":"))
