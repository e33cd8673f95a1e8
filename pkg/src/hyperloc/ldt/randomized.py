"""The randomized locator and the brute-force reference."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ..exact import dot, int_direction, sign
from ..forster import ConvergenceFailure, DimensionTooFew, forster_transform, identity_certificate
from ..oracle import Item, QueryTranscript, ask, label_query, sort_by_inner_product
from .common import InconsistentOracle, Prepared, prepare, resolve_signs, round_conditions, round_scales
from .config import LocateConfig


@dataclass(frozen=True)
class RoundRecord:
    size: int  # |H_i| at the start of the round (deduplicated)
    achieved_c: float
    forster_failed: bool
    sampled: int
    inferred: int  # vectors outside the sample whose sign was inferred
    fallback_labeled: int
    queries: int

    @property
    def fallback(self) -> bool:
        return self.fallback_labeled > 0


@dataclass
class ProgressLog:
    n_input: int = 0
    n_dedup: int = 0
    rounds: list = field(default_factory=list)
    final_labels: int = 0

    def resolved(self) -> int:
        """Deduplicated vectors accounted for by sampling, inference and direct labels."""
        return sum(r.sampled + r.inferred + r.fallback_labeled for r in self.rounds) + self.final_labels

    @property
    def fallbacks(self) -> int:
        return sum(1 for r in self.rounds if r.fallback)


class LocateResult(NamedTuple):
    signs: tuple
    transcript: QueryTranscript
    log: ProgressLog


def bruteforce_locate(H, x) -> tuple:
    """sign(<h, x>) for every h in H, exactly."""
    xi = int_direction([float(v) for v in np.asarray(x, dtype=float).ravel()])
    out = []
    for h in H:
        hi = int_direction([float(v) for v in np.asarray(h, dtype=float).ravel()])
        if len(hi) != len(xi):
            raise ValueError("dimension mismatch between H and x")
        out.append(sign(dot(hi, xi)))
    return tuple(out)


def _certificate(P: np.ndarray, cfg: LocateConfig):
    try:
        return forster_transform(P, cfg.target_c, cfg.forster_max_iters, cfg.forster_stall), False
    except (ConvergenceFailure, DimensionTooFew):
        return identity_certificate(P), True


def locate_randomized(H, oracle, cfg: LocateConfig | None = None) -> LocateResult:
    """Compute the sign vector of the oracle's hidden point against H.

    Every query is a generalized comparison over the original H; the result
    is exact whatever the random choices were, the randomness only affects
    how many queries are spent.
    """
    prep = H if isinstance(H, Prepared) else prepare(H)
    d = prep.d
    cfg = (cfg or LocateConfig()).validate(d)
    k = cfg.k(d)
    rng = np.random.default_rng(cfg.seed)
    transcript = QueryTranscript()
    log = ProgressLog(n_input=prep.n, n_dedup=len(prep.reps))
    labels: dict = {}
    Hq = prep.rows  # queries are expressed over the original rows
    remaining = list(prep.reps)

    def label(i):
        labels[i] = ask(oracle, label_query(Hq, i), transcript)
        return labels[i]

    while len(remaining) >= k:
        before = len(transcript)
        cert, failed = _certificate(prep.H[remaining], cfg)
        scale = dict(zip(remaining, round_scales(cert.scales, cfg.scale_bits)))
        pick = rng.choice(len(remaining), size=k, replace=False)
        S = [remaining[p] for p in sorted(pick)]
        for i in S:
            label(i)
        items = [Item(i, labels[i], scale[i]) for i in S if labels[i]]
        groups = sort_by_inner_product(oracle, items, Hq, transcript)
        conds = round_conditions(prep, {i: labels[i] for i in S}, groups)
        in_S = set(S)
        rest = [h for h in remaining if h not in in_S]
        forced = resolve_signs(d, conds, prep.ints, rest, cfg)
        labels.update(forced)
        rest = [h for h in rest if h not in forced]
        fallback = 0
        if len(forced) < cfg.min_progress and rest:
            batch = [rest[p] for p in sorted(rng.choice(len(rest), size=min(k, len(rest)), replace=False))]
            for i in batch:
                label(i)
            fallback = len(batch)
            chosen = set(batch)
            rest = [h for h in rest if h not in chosen]
        log.rounds.append(RoundRecord(len(remaining), float(cert.achieved_c), failed, len(S),
                                      len(forced), fallback, len(transcript) - before))
        remaining = rest

    for i in remaining:
        label(i)
    log.final_labels = len(remaining)
    return LocateResult(prep.expand(labels), transcript, log)
