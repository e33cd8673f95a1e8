"""Exact integer directions for float / rational vectors.

Signs of inner products are all the algorithms care about, so every vector is
reduced to a primitive integer vector pointing the same way. Floats are dyadic
rationals, which makes the conversion exact.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd

import numpy as np

IntVec = tuple  # tuple[int, ...]


def _ratio(v) -> tuple[int, int]:
    if isinstance(v, int):
        return v, 1
    if isinstance(v, Fraction):
        return v.numerator, v.denominator
    if isinstance(v, (np.integer,)):
        return int(v), 1
    f = float(v)
    if f != f or f in (float("inf"), float("-inf")):
        raise ValueError("non-finite coordinate")
    return f.as_integer_ratio()


def reduce_ints(v) -> IntVec:
    g = reduce(gcd, v, 0)
    if g <= 1:
        return tuple(v)
    return tuple(x // g for x in v)


def int_direction(vec) -> IntVec:
    """Primitive integer vector with the same direction as ``vec`` (zero stays zero)."""
    if isinstance(vec, tuple) and all(type(x) is int for x in vec):
        return reduce_ints(vec)
    pairs = [_ratio(x) for x in vec]
    den = 1
    for _, q in pairs:
        den = den * q // gcd(den, q)
    return reduce_ints([p * (den // q) for p, q in pairs])


def exact_vector(vec) -> tuple[Fraction, ...]:
    return tuple(Fraction(*_ratio(x)) for x in vec)


def combine(a, u, b, v) -> IntVec:
    """Direction of a*u - b*v for exact scalars a, b and vectors u, v."""
    an, ad = _ratio(a)
    bn, bd = _ratio(b)
    U = [_ratio(x) for x in u]
    V = [_ratio(x) for x in v]
    den = 1
    for _, q in U:
        den = den * (ad * q) // gcd(den, ad * q)
    for _, q in V:
        den = den * (bd * q) // gcd(den, bd * q)
    out = []
    for (pu, qu), (pv, qv) in zip(U, V):
        out.append(an * pu * (den // (ad * qu)) - bn * pv * (den // (bd * qv)))
    return reduce_ints(out)


def dot(a: IntVec, b: IntVec) -> int:
    return sum(x * y for x, y in zip(a, b))


def sign(v) -> int:
    return (v > 0) - (v < 0)


def is_zero(v: IntVec) -> bool:
    return not any(v)


def canonical(v: IntVec) -> tuple[IntVec, int]:
    """Return (w, s) with v = s*w (up to positive scale) and w's first nonzero entry positive."""
    for x in v:
        if x:
            if x > 0:
                return v, 1
            return tuple(-y for y in v), -1
    raise ValueError("zero vector has no canonical direction")


def to_float(v: IntVec) -> np.ndarray:
    """Float approximation of the unit vector along ``v``."""
    big = max((abs(x).bit_length() for x in v), default=0)
    shift = max(0, big - 500)  # squares must stay finite in the norm
    f = np.array([float(x >> shift) if x >= 0 else -float((-x) >> shift) for x in v])
    n = np.linalg.norm(f)
    return f / n if n else f
