import math
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperloc.exact import int_direction
from hyperloc.inference import (UNKNOWN, InfeasibleConditions, NodeLimitExceeded, SignCondition, cell_of,
                                cone_feasible, cone_witness, enumerate_patterns, infer, infer_comp, infer_many)

R = 1 / math.sqrt(2)
E1, E2 = (1.0, 0.0), (0.0, 1.0)


def exact_sign(q, y):
    v = sum(Fraction(a.item() if hasattr(a, "item") else a) * Fraction(b.item() if hasattr(b, "item") else b)
            for a, b in zip(q, y))
    return int(v > 0) - int(v < 0)


def plane_directions(Q, extra=2):
    """Independent oracle for d=2: every critical direction and every arc between them.

    The sign pattern is constant on the open arcs between consecutive
    normals-of-Q; sampling the normals themselves (exact integer) and the arc
    midpoints plus the origin hits every realizable pattern.
    """
    crit = []
    for q in Q:
        a, b = int_direction(q)
        for s in (1, -1):
            crit.append((-s * b, s * a))
    angles = sorted(set(math.atan2(y, x) for x, y in crit))
    pts = [(0, 0)] + crit
    for k, t in enumerate(angles):
        nxt = angles[(k + 1) % len(angles)] + (2 * math.pi if k + 1 == len(angles) else 0)
        for f in range(1, extra + 1):
            m = t + (nxt - t) * f / (extra + 1)
            pts.append((math.cos(m), math.sin(m)))
    if not angles:
        pts += [(1.0, 0.0)]
    return pts


def oracle_patterns(Q):
    return sorted({tuple(exact_sign(q, y) for q in Q) for y in plane_directions(Q)})


def grid_feasible(conditions):
    """Independent oracle for d=2 conditions via the critical directions."""
    Q = [q for q, _ in conditions]
    for y in plane_directions(Q):
        if all(exact_sign(q, y) == s for q, s in conditions):
            return True
    return False


# cone_feasible

def test_cone_feasible_examples():
    assert not cone_feasible([(E1, 1), (E1, -1)])
    diag = [(E1, 1), (E2, 1), ((R, R), -1)]
    assert not cone_feasible(diag)
    assert grid_feasible(diag) is False
    assert cone_feasible([(E1, 1), (E2, -1)])
    assert cone_feasible([], d=3)
    with pytest.raises(ValueError):
        cone_feasible([(E1, 1), ((1.0, 0.0, 0.0), 1)])
    with pytest.raises(ValueError):
        SignCondition((0.0, 0.0), 1)
    with pytest.raises(ValueError):
        SignCondition(E1, 2)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.tuples(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), st.sampled_from([-1, 0, 1])),
                min_size=1, max_size=5))
def test_cone_feasible_matches_plane_oracle(conds):
    conds = [(q, s) for q, s in conds if any(q)]
    if not conds:
        return
    assert cone_feasible(conds) == grid_feasible(conds)
    y = cone_witness(conds)
    if y is not None:
        assert all(exact_sign(q, y) == s for q, s in conds)


# infer

def test_infer_examples():
    S = [(E1, 1), (E2, 1)]
    assert infer(S, (R, R)) == 1
    assert infer(S, (R, -R)) is UNKNOWN
    assert infer([(E1, 0), (E2, 1)], E1) == 0
    with pytest.raises(InfeasibleConditions):
        infer([(E1, 1), (E1, -1)], E2)


def test_infer_comp_examples():
    assert infer_comp([E1], {0: 1}, [E1, (-1.0, 0.0), E2]) == [1, -1, UNKNOWN]
    answers = {0: 1, 1: 1, (0, 1): 1}  # x = (3, 1)
    assert infer_comp([E1, E2], answers, [(R, R)]) == [1]
    assert cone_feasible([(E1, 1), (E2, 1), ((1.0, -1.0), 1), ((R, R), -1)]) is False
    # orthogonal to everything asked
    S = [(1.0, 0.0, 0.0), (2.0, 0.0, 0.0)]
    assert infer_comp(S, {0: 1, 1: 1, (0, 1): -1}, [(0.0, 0.0, 1.0)]) == [UNKNOWN]
    with pytest.raises(InfeasibleConditions):
        infer_comp([E1, (2.0, 0.0)], {0: 1, 1: -1}, [E2])
    with pytest.raises(InfeasibleConditions):
        infer_comp([E1, E1], {(0, 1): 1}, [E2])


@settings(max_examples=120, deadline=None)
@given(st.integers(1, 4), st.integers(1, 6), st.integers(0, 2 ** 32 - 1), st.booleans())
def test_infer_comp_soundness(d, m, seed, degenerate):
    rng = np.random.default_rng(seed)
    S = rng.standard_normal((m, d))
    H = rng.standard_normal((20, d))
    x = rng.standard_normal(d)
    if degenerate:
        S = rng.integers(-3, 4, (m, d)).astype(float)
        H = rng.integers(-3, 4, (20, d)).astype(float)
        x = rng.integers(-2, 3, d).astype(float)
    S = np.vstack([S, -S])
    keep = [i for i in range(len(S)) if S[i].any()]
    S = S[keep]
    if not len(S):
        return
    answers = {i: exact_sign(S[i], x) for i in range(len(S))}
    answers.update({(i, j): exact_sign(S[i] - S[j], x) for i, j in combinations(range(len(S)), 2)})
    got = infer_comp(list(S), answers, list(H))
    for h, s in zip(H, got):
        if s is not UNKNOWN:
            assert s == exact_sign(h, x)
        if not h.any():
            assert s == 0


@settings(max_examples=120, deadline=None)
@given(st.integers(1, 3), st.integers(0, 5), st.integers(0, 2 ** 32 - 1))
def test_trichotomy_and_paths_agree(d, m, seed):
    rng = np.random.default_rng(seed)
    y = rng.integers(-2, 3, d)
    Q = [q for q in rng.integers(-3, 4, (m, d)) if q.any()]
    S = [(tuple(q), exact_sign(q, y)) for q in Q]
    cell = cell_of(S, d=d)
    hs = [h for h in rng.integers(-3, 4, (8, d)) if h.any()]
    fast = infer_many(cell, hs)
    for h, f in zip(hs, fast):
        got = infer(S, tuple(float(v) for v in h)) if S else f
        assert got == f
        if got is UNKNOWN:
            assert all(cone_feasible(S + [(tuple(h), s)], d) for s in (-1, 0, 1))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3), st.integers(1, 6), st.integers(0, 2 ** 32 - 1))
def test_monotonicity(d, m, seed):
    rng = np.random.default_rng(seed)
    y = rng.integers(-2, 3, d)
    Q = [tuple(q) for q in rng.integers(-3, 4, (m, d)) if q.any()]
    hs = [tuple(h) for h in rng.integers(-3, 4, (6, d)) if h.any()]
    previous = [UNKNOWN] * len(hs)
    for k in range(1, len(Q) + 1):
        cell = cell_of([(q, exact_sign(q, y)) for q in Q[:k]], d=d)
        now = infer_many(cell, hs)
        for before, after in zip(previous, now):
            if before is not UNKNOWN:
                assert after == before
        previous = now


# enumerate_patterns

def test_enumerate_examples():
    assert len(enumerate_patterns([E1, E2])) == 9
    assert enumerate_patterns([E1, E1]) == [(-1, -1), (0, 0), (1, 1)]
    three = enumerate_patterns([E1, E2, (R, R)])
    assert three == oracle_patterns([E1, E2, (R, R)])
    assert len(three) == 13  # origin, six rays and six open arcs
    with pytest.raises(NodeLimitExceeded):
        enumerate_patterns([E1, E2, (R, R)], limit=5)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=1, max_size=5))
def test_enumerate_matches_plane_oracle(Q):
    Q = [q for q in Q if any(q)]
    if not Q:
        return
    assert enumerate_patterns(Q) == oracle_patterns(Q)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(1, 6), st.integers(0, 2 ** 32 - 1))
def test_enumerate_contains_sampled_patterns(d, m, seed):
    rng = np.random.default_rng(seed)
    Q = [q for q in rng.integers(-3, 4, (m, d)) if q.any()]
    if not Q:
        return
    pats = set(enumerate_patterns(Q))
    ys = list(rng.standard_normal((1000, d)))
    ys += list(rng.integers(-1, 2, (200, d)))  # lattice points hit the hyperplanes
    for y in ys:
        assert tuple(exact_sign(q, y) for q in Q) in pats
    # every enumerated pattern is realizable
    for p in pats:
        assert cone_feasible([(tuple(q), s) for q, s in zip(Q, p)], d)
    assert len(pats) <= (2 * math.e * len(Q)) ** d + 1
