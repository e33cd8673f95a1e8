"""Cells of homogeneous sign conditions, kept as exact generators.

A cell {y : sign(q_i . y) = s_i for all i} is a relatively open convex cone.
Its closure is stored by the double description method as a lineality basis
plus a minimal list of extreme rays, all primitive integer vectors. Points of
the cell itself are the strictly positive combinations of the rays plus any
lineality vector, which makes "what signs can q take on this cell" a matter
of looking at the signs of q against the generators.
"""

from __future__ import annotations

import numpy as np

from .exact import IntVec, dot, reduce_ints, to_float

ALL_SIGNS = frozenset((-1, 0, 1))


class EmptyCell(ValueError):
    pass


class RayLimitExceeded(RuntimeError):
    pass


def _neg(v: IntVec) -> IntVec:
    return tuple(-x for x in v)


def _comb(a: int, u: IntVec, b: int, v: IntVec) -> IntVec:
    return reduce_ints([a * x - b * y for x, y in zip(u, v)])


class Cell:
    """Relatively open cone cut out by sign conditions.

    Cells are immutable; :meth:`add` returns a new cell.
    """

    __slots__ = ("d", "lineality", "rays", "masks", "nbits", "max_rays", "_float")

    def __init__(self, d, lineality, rays, masks, nbits, max_rays=None):
        self.d = d
        self.lineality = lineality
        self.rays = rays
        self.masks = masks
        self.nbits = nbits
        self.max_rays = max_rays
        self._float = None

    @classmethod
    def full(cls, d: int, max_rays: int | None = None) -> "Cell":
        basis = [tuple(int(i == j) for j in range(d)) for i in range(d)]
        return cls(d, basis, [], [], 0, max_rays)

    @classmethod
    def from_conditions(cls, d: int, conditions, max_rays: int | None = None) -> "Cell | None":
        """Cell of ``(q, s)`` pairs with integer q; None when the conditions are inconsistent."""
        cell = cls.full(d, max_rays)
        for q, s in conditions:
            if s not in cell.signs(q):
                return None
            cell = cell.add(q, s)
        return cell

    @property
    def dim(self) -> int:
        if not self.rays:
            return len(self.lineality)
        M = np.array([to_float(v) for v in self.lineality + self.rays])
        return int(np.linalg.matrix_rank(M))

    def signs(self, q: IntVec) -> frozenset:
        """Signs that sign(q . y) takes as y ranges over the cell."""
        for l in self.lineality:
            if dot(l, q):
                return ALL_SIGNS
        pos = neg = False
        for r in self.rays:
            v = dot(r, q)
            if v > 0:
                pos = True
            elif v < 0:
                neg = True
            if pos and neg:
                return ALL_SIGNS
        if pos:
            return frozenset((1,))
        if neg:
            return frozenset((-1,))
        return frozenset((0,))

    def sign(self, q: IntVec):
        """The constant sign of q on the cell, or None if it is not constant."""
        s = self.signs(q)
        return next(iter(s)) if len(s) == 1 else None

    def signs_many(self, Q_ints, Q_float=None, tol: float = 1e-9):
        """Constant sign (or None) for each q, with a float pre-pass.

        Float products whose magnitude exceeds ``tol`` decide the sign
        outright; the remainder are recomputed exactly.
        """
        if Q_float is None:
            return [self.sign(q) for q in Q_ints]
        gens = self.lineality + self.rays
        if not gens:
            return [0] * len(Q_ints)
        if self._float is None:
            self._float = np.array([to_float(g) for g in gens])
        D = np.asarray(Q_float) @ self._float.T
        nl = len(self.lineality)
        out = []
        for idx, q in enumerate(Q_ints):
            row = D[idx]
            ambiguous = np.abs(row) <= tol
            if ambiguous.any():
                exact = [dot(g, q) if amb else None for g, amb in zip(gens, ambiguous)]
                s = [(e > 0) - (e < 0) if e is not None else (1 if v > 0 else -1)
                     for e, v in zip(exact, row)]
            else:
                s = [1 if v > 0 else -1 for v in row]
            if any(s[:nl]):
                out.append(None)
                continue
            rs = s[nl:]
            has_pos = 1 in rs
            has_neg = -1 in rs
            if has_pos and has_neg:
                out.append(None)
            elif has_pos:
                out.append(1)
            elif has_neg:
                out.append(-1)
            else:
                out.append(0)
        return out

    def point(self) -> IntVec:
        """An integer point of the cell (sum of the extreme rays)."""
        p = [0] * self.d
        for r in self.rays:
            for i, x in enumerate(r):
                p[i] += x
        return tuple(p)

    def add(self, q: IntVec, s: int) -> "Cell":
        """Intersect with {sign(q . y) = s}; raises EmptyCell if that is empty."""
        if len(q) != self.d:
            raise ValueError(f"condition has dimension {len(q)}, cell has {self.d}")
        if s not in self.signs(q):
            raise EmptyCell("condition is inconsistent with the cell")
        if s == -1:
            q = _neg(q)
        bit = 1 << self.nbits
        lin, rays, masks = self._step(q, bit)
        if s == 0:
            keep = [i for i, r in enumerate(rays) if dot(r, q) == 0]
            rays = [rays[i] for i in keep]
            masks = [masks[i] for i in keep]
        if self.max_rays is not None and len(rays) > self.max_rays:
            raise RayLimitExceeded(f"cell has {len(rays)} extreme rays")
        return Cell(self.d, lin, rays, masks, self.nbits + 1, self.max_rays)

    def _step(self, q: IntVec, bit: int):
        """Double description update for the closed halfspace q . y >= 0."""
        lin = self.lineality
        dl = [dot(l, q) for l in lin]
        j = next((i for i, v in enumerate(dl) if v), None)
        if j is not None:
            l0, a0 = lin[j], dl[j]
            if a0 < 0:
                l0, a0 = _neg(l0), -a0
            new_lin = [_comb(a0, l, v, l0) if v else l
                       for i, (l, v) in enumerate(zip(lin, dl)) if i != j]
            new_rays = []
            new_masks = []
            for r, mk in zip(self.rays, self.masks):
                v = dot(r, q)
                new_rays.append(_comb(a0, r, v, l0) if v else r)
                new_masks.append(mk | bit)
            new_rays.append(l0)
            new_masks.append(bit - 1)
            return new_lin, new_rays, new_masks

        vals = [dot(r, q) for r in self.rays]
        pos = [i for i, v in enumerate(vals) if v > 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        new_rays = []
        new_masks = []
        for i, v in enumerate(vals):
            if v > 0:
                new_rays.append(self.rays[i])
                new_masks.append(self.masks[i])
            elif v == 0:
                new_rays.append(self.rays[i])
                new_masks.append(self.masks[i] | bit)
        if pos and neg:
            masks = self.masks
            nr = len(self.rays)
            for p in pos:
                mp = masks[p]
                for n in neg:
                    common = mp & masks[n]
                    adjacent = True
                    for t in range(nr):
                        if t != p and t != n and masks[t] & common == common:
                            adjacent = False
                            break
                    if adjacent:
                        new_rays.append(_comb(vals[p], self.rays[n], vals[n], self.rays[p]))
                        new_masks.append(common | bit)
        return list(lin), new_rays, new_masks
