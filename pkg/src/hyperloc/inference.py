"""Which hyperplane signs are forced by a set of answered sign queries."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cone import Cell
from .exact import IntVec, int_direction, is_zero, to_float
from .simplex import nullspace, strict_witness

import numpy as np

UNKNOWN = None


class InfeasibleConditions(ValueError):
    pass


class NodeLimitExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SignCondition:
    query: IntVec
    sign: int

    def __post_init__(self):
        q = int_direction(self.query)
        if is_zero(q):
            raise ValueError("sign condition on the zero vector")
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign!r}")
        object.__setattr__(self, "query", q)


def _split(conditions):
    conds = [c if isinstance(c, SignCondition) else SignCondition(*c) for c in conditions]
    if not conds:
        return conds, None
    d = len(conds[0].query)
    for c in conds:
        if len(c.query) != d:
            raise ValueError("dimension mismatch among conditions")
    return conds, d


def cone_witness(conditions, d: int | None = None):
    """A point y (tuple of Fractions) realizing every condition, or None."""
    conds, dd = _split(conditions)
    d = dd if dd is not None else d
    if d is None:
        raise ValueError("dimension unknown for an empty condition list")
    eq = [c.query for c in conds if c.sign == 0]
    strict = [tuple(c.sign * x for x in c.query) for c in conds if c.sign != 0]
    N = nullspace(eq, d) if eq else [tuple(int(i == j) for j in range(d)) for i in range(d)]
    if not strict:
        return tuple(Fraction(0) for _ in range(d))
    if not N:
        return None
    B = [tuple(sum(a * b for a, b in zip(row, n)) for n in N) for row in strict]
    if any(not any(b) for b in B):
        return None
    z = strict_witness(B, len(N))
    if z is None:
        return None
    return tuple(sum(z[k] * N[k][i] for k in range(len(N))) for i in range(d))


def cone_feasible(conditions, d: int | None = None) -> bool:
    """True iff some y has sign(q . y) = s for every condition (q, s)."""
    return cone_witness(conditions, d) is not None


def infer(S, h):
    """The sign of h forced by the conditions S, or UNKNOWN.

    Up to three feasibility checks, one per candidate sign.
    """
    conds, d = _split(S)
    hq = int_direction(h)
    if d is not None and len(hq) != d:
        raise ValueError("dimension mismatch between h and S")
    d = len(hq)
    if not cone_feasible(conds, d):
        raise InfeasibleConditions("S is not realizable")
    if is_zero(hq):
        return 0
    possible = [s for s in (-1, 0, 1) if cone_feasible(conds + [SignCondition(hq, s)], d)]
    return possible[0] if len(possible) == 1 else UNKNOWN


def cell_of(conditions, d: int | None = None, max_rays: int | None = None) -> Cell:
    conds, dd = _split(conditions)
    d = dd if dd is not None else d
    if d is None:
        raise ValueError("dimension unknown for an empty condition list")
    cell = Cell.from_conditions(d, [(c.query, c.sign) for c in conds], max_rays)
    if cell is None:
        raise InfeasibleConditions("conditions are not realizable")
    return cell


def infer_many(cell: Cell, H) -> list:
    """Forced sign (or UNKNOWN) of every vector of H on ``cell``."""
    ints = [int_direction(h) for h in H]
    floats = np.array([to_float(v) for v in ints]) if ints else None
    return cell.signs_many(ints, floats)


def infer_comp(S, answers, H) -> list:
    """Signs of H forced by labels and pairwise comparisons on S.

    ``answers`` maps ``i`` to sign(<S[i], x>) and ``(i, j)`` to
    sign(<S[i] - S[j], x>). Pass +-S (negations included) to get inference
    from comparisons on +-S.
    """
    S = [tuple(Fraction(v) if not isinstance(v, Fraction) else v for v in s) for s in S]
    seen = {}
    for key, s in answers.items():
        if isinstance(key, tuple):
            i, j = key
            q = int_direction([a - b for a, b in zip(S[i], S[j])])
        else:
            q = int_direction(S[key])
        if is_zero(q):
            if s != 0:
                raise InfeasibleConditions(f"nonzero answer {s} for a zero query {key!r}")
            continue
        prev = seen.get(q)
        if prev is not None and prev != s:
            raise InfeasibleConditions(f"contradictory answers for {key!r}")
        seen[q] = s
    if not S:
        raise ValueError("S must be nonempty")
    cell = cell_of([SignCondition(q, s) for q, s in seen.items()], d=len(S[0]))
    return infer_many(cell, H)


def enumerate_cells(Q, limit: int = 1_000_000, d: int | None = None):
    """All realizable sign patterns of the vectors Q, each with its cell.

    Depth-first extension: a pattern prefix is extended only by the signs the
    next vector actually takes on the prefix's cell.
    """
    Qi = [int_direction(q) for q in Q]
    if d is None:
        if not Qi:
            raise ValueError("dimension unknown for an empty Q")
        d = len(Qi[0])
    out = []
    nodes = 0
    stack = [((), Cell.full(d))]
    while stack:
        prefix, cell = stack.pop()
        nodes += 1
        if nodes > limit:
            raise NodeLimitExceeded(f"more than {limit} search nodes")
        k = len(prefix)
        if k == len(Qi):
            out.append((prefix, cell))
            continue
        q = Qi[k]
        if is_zero(q):
            stack.append((prefix + (0,), cell))
            continue
        for s in sorted(cell.signs(q), reverse=True):
            stack.append((prefix + (s,), cell.add(q, s)))
    out.sort(key=lambda t: t[0])
    return out


def enumerate_patterns(Q, limit: int = 1_000_000, d: int | None = None) -> list[tuple]:
    return [p for p, _ in enumerate_cells(Q, limit, d)]
