"""Universal sets: samples whose comparisons infer a fixed fraction of H everywhere."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exact import int_direction, is_zero, to_float
from ..inference import NodeLimitExceeded, enumerate_cells
from .config import LocateConfig


class VerificationTooLarge(RuntimeError):
    pass


class SearchExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class UniversalReport:
    cells: int
    min_inferred: int  # smallest |InferComp(S;x) & H| over all cells
    min_inferred_outside: int  # same, not counting members of S
    required: int  # ceil(|H| / (100 d))

    @property
    def certified(self) -> bool:
        return self.min_inferred >= self.required


def _required(n: int, d: int) -> int:
    return -(-n // (100 * d))


def _comparison_vectors(S, ints, rows):
    Q = [ints[i] for i in S]
    for a in range(len(S)):
        for b in range(a + 1, len(S)):
            q = int_direction([x - y for x, y in zip(rows[S[a]], rows[S[b]])])
            if not is_zero(q):
                Q.append(q)
    return list(dict.fromkeys(Q))


def _exact(H_unit):
    P = np.asarray(H_unit, dtype=float)
    if P.ndim != 2 or P.shape[0] == 0:
        raise ValueError("H_unit must be a nonempty list of vectors")
    rows = [tuple(float(v) for v in r) for r in P]
    return P, rows, [int_direction(r) for r in rows]


def universal_report(S, H_unit, limit: int = 200_000) -> UniversalReport:
    """Inference counts over every cell of the arrangement of S and S - S."""
    P, rows, ints = _exact(H_unit)
    n, d = P.shape
    S = sorted(set(int(i) for i in S))
    in_S = set(S)
    Q = _comparison_vectors(S, ints, rows)
    floats = np.array([to_float(q) for q in ints])
    worst = worst_out = n
    cells = 0
    for _, cell in enumerate_cells(Q, limit=limit, d=d):
        cells += 1
        signs = cell.signs_many(ints, floats)
        known = [i for i, s in enumerate(signs) if s is not None]
        worst = min(worst, len(known))
        worst_out = min(worst_out, sum(1 for i in known if i not in in_S))
    return UniversalReport(cells, worst, worst_out, _required(n, d))


def verify_universal(S, H_unit, limit: int = 200_000, shortcut: bool = True) -> bool:
    """True iff comparisons on S infer at least |H|/(100 d) members of H at every x.

    ``S`` holds indices into ``H_unit``. With ``shortcut`` the exhaustive
    enumeration is skipped when S alone is large enough, since every member
    of S is always inferred by its own label.
    """
    P = np.asarray(H_unit, dtype=float)
    n, d = P.shape
    distinct = len(set(int(i) for i in S))
    if shortcut and distinct >= _required(n, d):
        return True
    return universal_report(S, H_unit, limit).certified


def sampled_min_fraction(S, H_unit, rng, samples: int = 1000) -> float:
    """Heuristic check: smallest inferred fraction over random Gaussian x."""
    from ..cone import Cell
    from ..exact import dot, sign

    P, rows, ints = _exact(H_unit)
    n, d = P.shape
    S = sorted(set(int(i) for i in S))
    Q = _comparison_vectors(S, ints, rows)
    floats = np.array([to_float(q) for q in ints])
    worst = 1.0
    for _ in range(samples):
        x = int_direction([float(v) for v in rng.standard_normal(d)])
        cell = Cell.from_conditions(d, [(q, sign(dot(q, x))) for q in Q])
        signs = cell.signs_many(ints, floats)
        worst = min(worst, sum(s is not None for s in signs) / n)
    return worst


def universal_set(H_unit, cfg: LocateConfig | None = None, rng=None, *, shortcut: bool = True,
                  allow_heuristic: bool = False):
    """Sample-and-verify search for a universal set of size min(s, |H|).

    Returns the sorted list of indices. Raises VerificationTooLarge when a
    candidate cannot be verified exhaustively (unless ``allow_heuristic``, in
    which case a sampled-x check stands in), and SearchExhausted when no
    candidate among ``cfg.universal_candidates`` certifies.
    """
    cfg = cfg or LocateConfig()
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    P = np.asarray(H_unit, dtype=float)
    n, d = P.shape
    size = min(cfg.s(d), n)
    if size == n:
        return list(range(n))
    for _ in range(cfg.universal_candidates):
        S = sorted(int(i) for i in rng.choice(n, size=size, replace=False))
        try:
            ok = verify_universal(S, P, cfg.verify_limit, shortcut=shortcut)
        except NodeLimitExceeded:
            if not allow_heuristic:
                raise VerificationTooLarge(
                    f"more than {cfg.verify_limit} cells to check for |S|={size}, d={d}") from None
            ok = sampled_min_fraction(S, P, rng) * 100 * d >= 1
        if ok:
            return S
    raise SearchExhausted(f"no certified set among {cfg.universal_candidates} candidates")
