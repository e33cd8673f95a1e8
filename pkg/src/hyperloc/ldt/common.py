"""Pieces shared by the randomized and deterministic locators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..cone import Cell, RayLimitExceeded
from ..exact import IntVec, canonical, combine, dot, int_direction, is_zero, sign, to_float
from ..inference import cone_witness
from ..oracle import Item


class InconsistentOracle(RuntimeError):
    pass


@dataclass(frozen=True)
class Prepared:
    """H as given plus its exact form and the parallel-duplicate collapse.

    ``reps`` are original indices, one per direction class; ``rep_of[i]`` is
    the representative of H[i] and ``orient[i]`` is +1 when H[i] points the
    same way as its representative, -1 when it is antipodal.
    """

    H: np.ndarray
    rows: tuple  # H as tuples of Python floats (exact)
    ints: tuple
    reps: tuple
    rep_of: tuple
    orient: tuple

    @property
    def n(self) -> int:
        return len(self.ints)

    @property
    def d(self) -> int:
        return self.H.shape[1]

    def expand(self, rep_signs: dict) -> tuple:
        return tuple(self.orient[i] * rep_signs[self.rep_of[i]] for i in range(self.n))


def as_matrix(H) -> np.ndarray:
    if len(H) == 0:
        raise ValueError("H must be nonempty")
    rows = [np.asarray(h, dtype=float).ravel() for h in H]
    d = rows[0].shape[0]
    if d == 0:
        raise ValueError("hyperplanes must have dimension >= 1")
    for r in rows:
        if r.shape[0] != d:
            raise ValueError("dimension mismatch among hyperplanes")
    P = np.array(rows)
    if not np.all(np.isfinite(P)):
        raise ValueError("non-finite hyperplane coordinate")
    return P


def prepare(H) -> Prepared:
    P = as_matrix(H)
    rows = tuple(tuple(float(v) for v in row) for row in P)
    ints = tuple(int_direction(r) for r in rows)
    reps, rep_of, orient = [], [], []
    seen = {}
    for i, q in enumerate(ints):
        if is_zero(q):
            raise ValueError(f"hyperplane {i} is the zero vector")
        key, s = canonical(q)
        hit = seen.get(key)
        if hit is None:
            seen[key] = (i, s)
            reps.append(i)
            rep_of.append(i)
            orient.append(1)
        else:
            r, rs = hit
            rep_of.append(r)
            orient.append(s * rs)
    return Prepared(P, rows, ints, tuple(reps), tuple(rep_of), tuple(orient))


def round_conditions(prep: Prepared, labels: dict, groups) -> list:
    """Sign conditions known after labeling S and sorting its positivized items.

    The items sorted are sign(h)*scale*h for the nonzero-labeled h of S. The
    order of the full signed set is this order, its mirror image below zero,
    and the zero-labeled members at zero, so the labels, the gaps between
    neighbouring groups and the ties inside groups determine every pairwise
    difference.
    """
    conds = [(prep.ints[i], s) for i, s in labels.items()]
    for a, b in zip(groups, groups[1:]):
        lo, hi = a[0], b[0]
        q = _item_diff(prep.rows, hi, lo)
        if not is_zero(q):
            conds.append((q, 1))
    for g in groups:
        for it in g[1:]:
            q = _item_diff(prep.rows, it, g[0])
            if not is_zero(q):
                conds.append((q, 0))
    return conds


def _item_diff(rows, a: Item, b: Item) -> IntVec:
    return combine(a.sign * a.scale, rows[a.index], b.sign * b.scale, rows[b.index])


def resolve_signs(d: int, conds, ints, targets, cfg, cell: Cell | None = None) -> dict:
    """Forced sign of each target index under ``conds`` (targets absent from the result are unknown).

    Uses the exact double-description cell in low dimension and per-target
    LPs otherwise or when the cell grows past ``cfg.max_cell_rays``.
    """
    if cell is None and d <= cfg.dd_max_dim:
        try:
            cell = Cell.from_conditions(d, conds, cfg.max_cell_rays)
        except RayLimitExceeded:
            cell = None
        else:
            if cell is None:
                raise InconsistentOracle("oracle answers admit no point")
    if cell is not None:
        targets = list(targets)
        if not targets:
            return {}
        Qi = [ints[t] for t in targets]
        Qf = np.array([to_float(q) for q in Qi])
        out = cell.signs_many(Qi, Qf)
        return {t: s for t, s in zip(targets, out) if s is not None}
    return _resolve_lp(d, conds, ints, targets)


def _resolve_lp(d: int, conds, ints, targets) -> dict:
    y0 = cone_witness(conds, d)
    if y0 is None:
        raise InconsistentOracle("oracle answers admit no point")
    witnesses = [y0]
    out = {}
    for t in targets:
        h = ints[t]
        seen = {sign(sum(a * b for a, b in zip(h, w))) for w in witnesses}
        if len(seen) > 1:
            continue  # two points of the cell disagree
        s0 = next(iter(seen))
        probe = 0 if s0 else 1
        y = cone_witness(list(conds) + [(h, probe)], d)
        if y is None:
            out[t] = s0
        else:
            witnesses.append(y)
    return out


def round_scales(scales, bits: int) -> list:
    """Positive scales rounded to ``bits`` significant bits (exact small rationals)."""
    m, e = np.frexp(np.asarray(scales, dtype=float))
    return [float(v) for v in np.ldexp(np.round(m * 2.0 ** bits), e - bits)]
