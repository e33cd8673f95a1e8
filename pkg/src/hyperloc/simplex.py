"""Exact rational simplex for homogeneous strict-feasibility problems.

The question asked of the solver is always the same: given integer rows
b_1..b_m in R^r, is there z with b_i . z > 0 for every i? By Gordan's
alternative this fails exactly when some convex combination of the rows is
zero, which is a phase-1 problem with only r + 1 equality rows. Pivoting uses
Bland's rule over Fractions, so termination and answers are exact.
"""

from __future__ import annotations

from fractions import Fraction


def nullspace(rows, d: int) -> list[tuple[int, ...]]:
    """Integer basis of {y in Q^d : row . y = 0 for every row}."""
    M = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    row = 0
    for col in range(d):
        if row >= len(M):
            break
        piv = next((i for i in range(row, len(M)) if M[i][col] != 0), None)
        if piv is None:
            continue
        M[row], M[piv] = M[piv], M[row]
        inv = 1 / M[row][col]
        M[row] = [x * inv for x in M[row]]
        for i in range(len(M)):
            if i != row and M[i][col] != 0:
                f = M[i][col]
                M[i] = [a - f * b for a, b in zip(M[i], M[row])]
        pivots.append(col)
        row += 1
    free = [c for c in range(d) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * d
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -M[i][fc]
        den = 1
        for x in v:
            den = den * x.denominator // _gcd(den, x.denominator)
        basis.append(_primitive([int(x * den) for x in v]))
    return basis


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _primitive(v):
    g = 0
    for x in v:
        g = _gcd(g, x)
    return tuple(x // g for x in v) if g > 1 else tuple(v)


def strict_witness(rows, r: int):
    """Return z with row . z > 0 for all rows, or None.

    Phase-1 simplex on  sum_i lam_i b_i = 0,  sum_i lam_i = 1,  lam >= 0.
    A positive optimum means no such lam exists; the optimal duals then
    give the witness z. The tableau is kept in integers by fraction-free
    pivoting: every entry is the true value times the last pivot, so each
    update divides exactly.
    """
    m = len(rows)
    if m == 0:
        return tuple(Fraction(0) for _ in range(r))
    nrow = r + 1
    ncol = m + nrow
    T = []
    for k in range(r):
        line = [int(rows[i][k]) for i in range(m)] + [0] * (nrow + 1)
        line[m + k] = 1
        T.append(line)
    line = [1] * m + [0] * nrow + [1]
    line[m + r] = 1
    T.append(line)
    obj = [-sum(T[k][j] for k in range(nrow)) for j in range(ncol + 1)]
    for k in range(nrow):
        obj[m + k] = 0
    basis = [m + k for k in range(nrow)]
    det = 1

    while True:
        enter = next((j for j in range(ncol) if obj[j] < 0), None)
        if enter is None:
            break
        best = None
        for k in range(nrow):
            a = T[k][enter]
            if a > 0:
                rhs = T[k][ncol]
                if best is None:
                    best = (k, rhs, a)
                    continue
                _, brhs, ba = best
                lhs, rgt = rhs * ba, brhs * a  # compare rhs/a with brhs/ba
                if lhs < rgt or lhs == rgt and basis[k] < basis[best[0]]:
                    best = (k, rhs, a)
        if best is None:  # cannot happen: the feasible region is bounded
            raise RuntimeError("unbounded phase-1 problem")
        k = best[0]
        Tk = T[k]
        p = Tk[enter]
        for i in range(nrow):
            if i == k:
                continue
            Ti = T[i]
            f = Ti[enter]
            if f:
                T[i] = [(p * a - f * b) // det for a, b in zip(Ti, Tk)]
            elif p != det:
                T[i] = [(p * a) // det for a in Ti]
        f = obj[enter]
        obj = [(p * a - f * b) // det for a, b in zip(obj, Tk)]
        det = p
        basis[k] = enter

    if obj[ncol] == 0:
        return None
    # dual of equality row k is 1 - reduced cost of its artificial column (times det)
    z = tuple(Fraction(obj[m + k] - det, det) for k in range(r))
    for row in rows:
        if sum(Fraction(a) * b for a, b in zip(row, z)) <= 0:
            raise AssertionError("simplex witness failed verification")
    return z
