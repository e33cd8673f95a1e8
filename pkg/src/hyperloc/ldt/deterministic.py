"""Deterministic locator: universal sets per round, no randomness at query time.

The locator is a resumable state machine (``next_query`` / ``answer``) so the
tree builder can fork it at every branching point.
"""

from __future__ import annotations

import zlib

import numpy as np

from ..forster import apply_certificate
from ..oracle import Item, QueryTranscript, ZeroQuery, ask, label_query, make_query
from .common import Prepared, prepare, resolve_signs, round_conditions, round_scales
from .config import LocateConfig
from .randomized import _certificate
from .universal import universal_set


class _Context:
    """Per-instance data shared by all forks of a deterministic run."""

    def __init__(self, prep: Prepared, cfg: LocateConfig):
        self.prep = prep
        self.cfg = cfg
        self.d = prep.d
        self.s = cfg.s(prep.d)
        self._plans = {}

    def plan(self, remaining: tuple):
        """(S, scales) for a round on ``remaining``; memoized on the surviving set."""
        hit = self._plans.get(remaining)
        if hit is not None:
            return hit
        P = self.prep.H[list(remaining)]
        cert, _ = _certificate(P, self.cfg)
        unit = apply_certificate(cert, P)
        digest = zlib.crc32(np.asarray(remaining, dtype=np.int64).tobytes())
        rng = np.random.default_rng([self.cfg.seed, digest])
        picked = universal_set(unit, self.cfg, rng, allow_heuristic=True)
        S = [remaining[j] for j in picked]
        scale = dict(zip(remaining, round_scales(cert.scales, self.cfg.scale_bits)))
        self._plans[remaining] = (S, scale)
        return S, scale


class DeterministicLocator:
    """One run of the deterministic algorithm, driven by external answers."""

    def __init__(self, ctx: _Context):
        self.ctx = ctx
        self.remaining = tuple(ctx.prep.reps)
        self.labels = {}
        self.phase = "round"
        self.S = []
        self.scale = {}
        self.round_labels = {}
        self.pending = []
        self.groups = []
        self.cur = None
        self.lo = self.hi = 0
        self.queue = []
        self.pos = 0
        self.rounds = 0

    def copy(self) -> "DeterministicLocator":
        new = object.__new__(DeterministicLocator)
        new.__dict__.update(self.__dict__)
        new.labels = dict(self.labels)
        new.round_labels = dict(self.round_labels)
        new.pending = list(self.pending)
        new.groups = [list(g) for g in self.groups]
        return new

    def _rows(self):
        return self.ctx.prep.rows

    def next_query(self):
        """The next query to ask, or None when every sign is known."""
        while True:
            if self.phase == "round":
                if len(self.remaining) <= self.ctx.s:
                    self.queue, self.pos, self.phase = list(self.remaining), 0, "final"
                    continue
                self.S, self.scale = self.ctx.plan(self.remaining)
                self.round_labels, self.pos, self.phase = {}, 0, "labels"
                self.rounds += 1
                continue
            if self.phase == "labels":
                if self.pos < len(self.S):
                    return label_query(self._rows(), self.S[self.pos])
                self.pending = [Item(i, self.round_labels[i], self.scale[i])
                                for i in self.S if self.round_labels[i]]
                self.groups, self.cur, self.phase = [], None, "sort"
                continue
            if self.phase == "sort":
                if self.cur is None:
                    if not self.pending:
                        self._finish_round()
                        continue
                    self.cur = self.pending.pop(0)
                    if not self.groups:
                        self.groups, self.cur = [[self.cur]], None
                        continue
                    self.lo, self.hi = 0, len(self.groups)
                rep = self.groups[(self.lo + self.hi) // 2][0]
                cur = self.cur
                try:
                    return make_query(self._rows(), cur.index, rep.index,
                                      cur.sign * cur.scale, rep.sign * rep.scale)
                except ZeroQuery:
                    self._sort_answer(0)
                    continue
            if self.phase in ("fallback", "final"):
                if self.pos < len(self.queue):
                    return label_query(self._rows(), self.queue[self.pos])
                if self.phase == "final":
                    self.remaining, self.phase = (), "done"
                    continue
                self.phase = "round"
                continue
            return None

    def answer(self, a: int) -> None:
        if a not in (-1, 0, 1):
            raise ValueError(f"answer must be -1, 0 or +1, got {a!r}")
        if self.phase == "labels":
            i = self.S[self.pos]
            self.round_labels[i] = self.labels[i] = a
            self.pos += 1
        elif self.phase == "sort":
            self._sort_answer(a)
        elif self.phase in ("fallback", "final"):
            self.labels[self.queue[self.pos]] = a
            self.pos += 1
        else:
            raise RuntimeError(f"no query outstanding in phase {self.phase!r}")

    def _sort_answer(self, a: int) -> None:
        mid = (self.lo + self.hi) // 2
        if a == 0:
            self.groups[mid].append(self.cur)
            self.cur = None
            return
        if a < 0:
            self.hi = mid
        else:
            self.lo = mid + 1
        if self.lo == self.hi:
            self.groups.insert(self.lo, [self.cur])
            self.cur = None

    def _finish_round(self) -> None:
        ctx = self.ctx
        conds = round_conditions(ctx.prep, self.round_labels, self.groups)
        in_S = set(self.S)
        rest = [h for h in self.remaining if h not in in_S]
        forced = resolve_signs(ctx.d, conds, ctx.prep.ints, rest, ctx.cfg)
        self.labels.update(forced)
        rest = [h for h in rest if h not in forced]
        self.groups = []
        if len(forced) < ctx.cfg.min_progress and rest:
            self.queue = rest[:min(ctx.s, len(rest))]
            self.remaining = tuple(rest[len(self.queue):])
            self.pos, self.phase = 0, "fallback"
        else:
            self.remaining = tuple(rest)
            self.phase = "round"

    def result(self) -> tuple:
        if self.phase != "done":
            raise RuntimeError("locator has not finished")
        return self.ctx.prep.expand(self.labels)


def new_locator(H, cfg: LocateConfig | None = None) -> DeterministicLocator:
    prep = H if isinstance(H, Prepared) else prepare(H)
    cfg = (cfg or LocateConfig()).validate(prep.d)
    return DeterministicLocator(_Context(prep, cfg))


def locate_deterministic(H, oracle, cfg: LocateConfig | None = None):
    """Run the deterministic algorithm against an oracle; returns (signs, transcript)."""
    run = new_locator(H, cfg)
    transcript = QueryTranscript()
    while (q := run.next_query()) is not None:
        run.answer(ask(oracle, q, transcript))
    return run.result(), transcript
