import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperloc.forster import forster_transform
from hyperloc.oracle import (COMPARISON, GENERALIZED, LABEL, NONE, Item, PointOracle, QueryTranscript, ZeroQuery,
                             ask, label_query, make_query, sort_by_inner_product)

E = np.eye(2)


def exact_key(item, H, x):
    return Fraction(item.sign) * Fraction(item.scale) * sum(Fraction(a) * Fraction(b) for a, b in zip(H[item.index], x))


def check_legal(q, H):
    assert abs(abs(q.alpha) + abs(q.beta) - 1) <= 1e-12
    u = H[q.i] if q.i is not None else np.zeros(len(q.vector))
    v = H[q.j] if q.j is not None else np.zeros(len(q.vector))
    assert np.allclose(q.alpha * np.asarray(u) - q.beta * np.asarray(v), q.vector, atol=1e-12, rtol=0)


def test_make_query_examples():
    H = np.eye(4)
    q = make_query(H, 3, NONE, 1, 0)
    assert q.kind == LABEL and q.alpha == 1 and q.beta == 0
    assert np.array_equal(q.vector, H[3])
    q = make_query(H, 1, 2, 1, 1)
    assert q.kind == COMPARISON and q.alpha == q.beta == 0.5
    assert np.allclose(q.vector, (H[1] - H[2]) / 2)
    assert make_query(H, NONE, 2, 0, 1).kind == LABEL
    with pytest.raises(ZeroQuery):
        make_query(H, 1, 1, 1, 1)
    with pytest.raises(ZeroQuery):
        make_query(H, 1, 2, 0, 0)
    with pytest.raises(IndexError):
        make_query(H, 7, NONE, 1, 0)


def test_forster_scaled_query():
    H = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    cert = forster_transform(H, 0.99)
    s1, s2 = cert.scales[1], cert.scales[2]
    q = make_query(H, 1, 2, s1, s2)
    assert q.kind == GENERALIZED
    check_legal(q, H)
    assert q.alpha == pytest.approx(s1 / (s1 + s2), abs=1e-15)


def test_ask_examples():
    t = QueryTranscript()
    assert ask(PointOracle([2, 1]), label_query(E, 0), t) == 1
    assert ask(PointOracle([1, 1]), make_query(E, 0, 1, 1, 1), t) == 0
    assert ask(PointOracle([1, 3]), make_query(E, 0, 1, 0.25, 0.75), t) == -1
    assert t.counters == {LABEL: 1, COMPARISON: 1, GENERALIZED: 1}
    assert len(t) == 3
    rows = QueryTranscript.parse_csv(t.to_csv())
    assert [r["answer"] for r in rows] == [1, 0, -1]
    assert rows[2] == {"kind": GENERALIZED, "i": 0, "j": 1, "alpha": 0.25, "beta": 0.75, "answer": -1}
    assert rows[0]["j"] is None


def test_oracle_rejects_dimension():
    with pytest.raises(ValueError):
        PointOracle([1, 2]).answer((1, 0, 0))


def test_sort_examples():
    oracle = PointOracle([2, 1])
    t = QueryTranscript()
    assert sort_by_inner_product(oracle, [Item(0, 1, 1.0)], E, t) == [[Item(0, 1, 1.0)]]
    assert len(t) == 0
    items = [Item(0, 1, 1.0), Item(1, 1, 1.0), Item(0, -1, 1.0), Item(1, -1, 1.0)]
    groups = sort_by_inner_product(oracle, items, E, t)
    assert groups == [[Item(0, -1, 1.0)], [Item(1, -1, 1.0)], [Item(1, 1, 1.0)], [Item(0, 1, 1.0)]]
    H = np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
    items = [Item(0, 1, 6.0), Item(1, 1, 3.0), Item(2, 1, 2.0)]
    assert len(sort_by_inner_product(PointOracle([1, 2]), items, H)) == 1
    assert sort_by_inner_product(oracle, [], E) == []


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 5), st.integers(1, 24), st.integers(0, 2 ** 32 - 1), st.booleans())
def test_sort_correct_legal_and_bounded(d, m, seed, ties):
    rng = np.random.default_rng(seed)
    if ties:
        H = rng.integers(-2, 3, (m, d)).astype(float)
        H[~H.any(axis=1), 0] = 1.0
        x = rng.integers(-2, 3, d)
        scales = rng.choice([0.5, 1.0, 2.0], m)
    else:
        H = rng.standard_normal((m, d))
        x = rng.standard_normal(d)
        scales = np.exp(rng.uniform(-3, 3, m))
    items = [Item(k, int(rng.choice([-1, 1])), float(scales[k])) for k in range(m)]
    t = QueryTranscript()
    groups = sort_by_inner_product(PointOracle(x), items, H, t)
    assert sorted((it for g in groups for it in g), key=lambda it: it.index) == items
    keys = [[exact_key(it, H, x) for it in g] for g in groups]
    for g in keys:
        assert len(set(g)) == 1
    heads = [g[0] for g in keys]
    assert all(a < b for a, b in zip(heads, heads[1:]))
    assert len(t) <= m * math.ceil(math.log2(m)) + m if m > 1 else len(t) == 0
    for q, ans in t.entries:
        check_legal(q, H)
        exact = [q.a * Fraction(u) - q.b * Fraction(v) for u, v in zip(H[q.i], H[q.j])]
        val = sum(e * Fraction(c.item()) for e, c in zip(exact, x))
        assert ans == (val > 0) - (val < 0)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 30), st.integers(1, 3), st.integers(2, 20), st.integers(0, 2 ** 32 - 1))
def test_sparsity_of_queries(d, k, m, seed):
    rng = np.random.default_rng(seed)
    H = np.zeros((m, d))
    for r in range(m):
        H[r, rng.choice(d, size=min(k, d), replace=False)] = rng.choice([-1.0, 1.0], min(k, d))
    scales = np.exp(rng.uniform(-2, 2, m))
    items = [Item(r, int(rng.choice([-1, 1])), float(scales[r])) for r in range(m)]
    t = QueryTranscript()
    sort_by_inner_product(PointOracle(rng.standard_normal(d)), items, H, t)
    for q, _ in t.entries:
        assert np.count_nonzero(q.vector) <= 2 * k
        assert sum(1 for v in q.direction if v) <= 2 * k
