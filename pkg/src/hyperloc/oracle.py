"""Generalized comparison queries, the sign oracle and the query transcript."""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Protocol, Sequence

import numpy as np

from .exact import IntVec, combine, dot, int_direction, is_zero, sign

NONE = None
LABEL, COMPARISON, GENERALIZED = "label", "comparison", "generalized"


class ZeroQuery(ValueError):
    pass


@dataclass(frozen=True)
class GenComparisonQuery:
    """sign(<x, alpha*H[i] - beta*H[j]>) with |alpha| + |beta| = 1.

    ``i`` or ``j`` may be NONE, in which case that term is absent. ``a`` and
    ``b`` are the coefficients as requested, before normalization; they fix
    the exact integer ``direction`` used by the oracle and by inference, so
    two queries built from the same scales are exactly consistent with each
    other. ``alpha``/``beta`` and ``vector`` are the normalized float forms.
    """

    i: int | None
    j: int | None
    alpha: float
    beta: float
    a: Fraction = field(compare=False, repr=False)
    b: Fraction = field(compare=False, repr=False)
    vector: np.ndarray = field(compare=False, repr=False)
    direction: IntVec = field(compare=False, repr=False)

    @property
    def kind(self) -> str:
        if self.beta == 0 and self.j is None or self.alpha == 0 and self.i is None:
            return LABEL
        if self.alpha == 0.5 and self.beta == 0.5:
            return COMPARISON
        return GENERALIZED


def make_query(H, i, j, alpha, beta) -> GenComparisonQuery:
    n = len(H)
    for idx in (i, j):
        if idx is not None and not 0 <= idx < n:
            raise IndexError(f"hyperplane index {idx} out of range")
    a = Fraction(alpha) if i is not None else Fraction(0)
    b = Fraction(beta) if j is not None else Fraction(0)
    total = abs(a) + abs(b)
    if total == 0:
        raise ZeroQuery("both coefficients are zero")
    d = len(H[i if i is not None else j])
    zero = (0,) * d
    u = H[i] if i is not None else zero
    v = H[j] if j is not None else zero
    direction = combine(a, u, b, v)
    if is_zero(direction):
        raise ZeroQuery("query vector is zero (parallel hyperplanes with matching coefficients)")
    fa, fb = float(a / total), float(b / total)
    vec = np.zeros(d)
    if i is not None:
        vec = vec + fa * np.asarray(u, dtype=float)
    if j is not None:
        vec = vec - fb * np.asarray(v, dtype=float)
    return GenComparisonQuery(i, j, fa, fb, a, b, vec, direction)


def label_query(H, i) -> GenComparisonQuery:
    return make_query(H, i, NONE, 1, 0)


class SignOracle(Protocol):
    def answer(self, q) -> int: ...


class PointOracle:
    """Answers sign(<q, x>) exactly for a hidden point x."""

    def __init__(self, x):
        self._x = int_direction(x)
        self.d = len(self._x)

    def answer(self, q) -> int:
        qi = q if isinstance(q, tuple) and all(type(v) is int for v in q) else int_direction(q)
        if len(qi) != self.d:
            raise ValueError(f"query has dimension {len(qi)}, oracle expects {self.d}")
        return sign(dot(qi, self._x))


@dataclass
class QueryTranscript:
    entries: list = field(default_factory=list)
    counters: Counter = field(default_factory=Counter)

    def record(self, q: GenComparisonQuery, answer: int) -> None:
        self.entries.append((q, answer))
        self.counters[q.kind] += 1

    def __len__(self):
        return len(self.entries)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["kind", "i", "j", "alpha", "beta", "answer"])
        for q, ans in self.entries:
            w.writerow([q.kind, "" if q.i is None else q.i, "" if q.j is None else q.j,
                        format(q.alpha, ".17g"), format(q.beta, ".17g"), ans])
        return buf.getvalue()

    @staticmethod
    def parse_csv(text: str) -> list[dict]:
        rows = []
        for rec in csv.DictReader(io.StringIO(text)):
            rows.append({
                "kind": rec["kind"],
                "i": int(rec["i"]) if rec["i"] else None,
                "j": int(rec["j"]) if rec["j"] else None,
                "alpha": float(rec["alpha"]),
                "beta": float(rec["beta"]),
                "answer": int(rec["answer"]),
            })
        return rows


def ask(oracle, q: GenComparisonQuery, transcript: QueryTranscript | None = None) -> int:
    ans = oracle.answer(q.direction)
    if transcript is not None:
        transcript.record(q, ans)
    return ans


@dataclass(frozen=True)
class Item:
    """The vector sign * scale * H[index]."""

    index: int
    sign: int
    scale: float


def compare_items(oracle, a: Item, b: Item, H, transcript) -> int:
    """Three-way comparison of <a, x> and <b, x> with one generalized comparison."""
    try:
        q = make_query(H, a.index, b.index, a.sign * a.scale, b.sign * b.scale)
    except ZeroQuery:
        return 0  # identical vectors: equal for every x, no query needed
    return ask(oracle, q, transcript)


def _merge(left, right, cmp):
    out = []
    i = j = 0
    while i < len(left) and j < len(right):
        c = cmp(left[i][0], right[j][0])
        if c < 0:
            out.append(left[i])
            i += 1
        elif c > 0:
            out.append(right[j])
            j += 1
        else:
            out.append(left[i] + right[j])
            i += 1
            j += 1
    out.extend(left[i:])
    out.extend(right[j:])
    return out


def sort_by_inner_product(oracle, items: Sequence, H, transcript=None) -> list[list[Item]]:
    """Mergesort ``items`` by <item, x>, ascending, using only comparison queries.

    Returns the order as a list of equality groups. Uses at most
    m*ceil(log2 m) + m queries for m items.
    """
    items = [it if isinstance(it, Item) else Item(*it) for it in items]

    def cmp(a, b):
        return compare_items(oracle, a, b, H, transcript)

    def rec(lo, hi):
        if hi - lo == 1:
            return [[items[lo]]]
        mid = (lo + hi) // 2
        return _merge(rec(lo, mid), rec(mid, hi), cmp)

    if not items:
        return []
    return rec(0, len(items))
