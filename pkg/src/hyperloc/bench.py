"""Experiment harness: query counts, inference rates, subsample isotropy."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .forster import ConvergenceFailure, apply_certificate, forster_transform
from .ldt.common import prepare, resolve_signs, round_conditions
from .ldt.config import LocateConfig
from .ldt.randomized import locate_randomized
from .linalg import isotropy_report
from .oracle import Item, PointOracle, ask, label_query, sort_by_inner_product

DISTRIBUTIONS = ("sphere", "sparse", "exp-scales", "basis")
CSV_COLUMNS = ("d", "n", "dist", "seed", "trial", "labels", "comparisons", "generalized", "rounds",
               "fallbacks")
Z99 = 2.3263478740408408  # one-sided 99% normal quantile


def trial_rng(seed: int, *key) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *[int(k) for k in key]]))


def make_instance(dist: str, d: int, n: int, rng: np.random.Generator, sparsity: int = 3) -> np.ndarray:
    """n hyperplanes in dimension d drawn from a named family."""
    if dist == "sphere":
        H = rng.standard_normal((n, d))
    elif dist == "sparse":
        H = np.zeros((n, d))
        m = min(sparsity, d)
        for row in H:
            cols = rng.choice(d, size=m, replace=False)
            row[cols] = rng.choice((-1.0, 1.0), size=m)
    elif dist == "exp-scales":
        H = rng.standard_normal((n, d)) * 10.0 ** rng.uniform(-6, 6, size=(n, 1))
    elif dist == "basis":
        H = np.tile(np.eye(d), (-(-n // d), 1))[:n]
    else:
        raise ValueError(f"unknown distribution {dist!r}; choose from {DISTRIBUTIONS}")
    norms = np.linalg.norm(H, axis=1)
    H[norms == 0, 0] = 1.0
    if dist != "exp-scales":
        H = H / np.linalg.norm(H, axis=1)[:, None]
    return H


def isotropic_instance(d: int, n: int, rng: np.random.Generator, dist: str = "sphere") -> np.ndarray:
    """Unit vectors brought into 0.99-approximate isotropic position."""
    H = make_instance(dist, d, n, rng)
    try:
        return apply_certificate(forster_transform(H, 0.99), H)
    except ConvergenceFailure:
        return H / np.linalg.norm(H, axis=1)[:, None]


@dataclass
class BenchReport:
    kind: str
    rows: list = field(default_factory=list)
    summary: list = field(default_factory=list)
    columns: tuple = ()
    summary_columns: tuple = ()
    transcripts: dict = field(default_factory=dict, repr=False)

    def to_csv(self) -> str:
        return _csv(self.columns, self.rows)

    def summary_csv(self) -> str:
        return _csv(self.summary_columns, self.summary)

    def to_table(self) -> str:
        cols = self.summary_columns
        cells = [[_fmt(r[c]) for c in cols] for r in self.summary]
        widths = [max([len(c)] + [len(row[k]) for row in cells]) for k, c in enumerate(cols)]
        lines = ["  ".join(c.rjust(w) for c, w in zip(cols, widths)),
                 "  ".join("-" * w for w in widths)]
        lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
        return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.4g}"
    return str(v)


def _csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) if isinstance(r[c], float) else r[c] for c in columns])
    return buf.getvalue()


def _p95(values) -> float:
    return float(np.percentile(values, 95)) if len(values) else 0.0


def bench_query_scaling(dims, sizes, trials: int, cfg: LocateConfig | None = None,
                        dist: str = "sphere", seed: int = 0,
                        keep_transcripts: bool = False) -> BenchReport:
    """Query counts of the randomized locator over a (d, n) grid."""
    cfg = cfg or LocateConfig()
    rep = BenchReport("query_scaling", columns=CSV_COLUMNS,
                      summary_columns=("d", "n", "dist", "trials", "mean_queries", "p95_queries",
                                       "mean_rounds", "ratio_model", "ratio_n", "ratio_info"))
    for d in dims:
        for n in sizes:
            totals, rounds = [], []
            for trial in range(trials):
                rng = trial_rng(seed, d, n, trial)
                H = make_instance(dist, d, n, rng)
                x = rng.standard_normal(d)
                res = locate_randomized(H, PointOracle(x), cfg.with_(seed=int(rng.integers(2 ** 31))))
                c = res.transcript.counters
                row = {"d": d, "n": n, "dist": dist, "seed": seed, "trial": trial,
                       "labels": c["label"], "comparisons": c["comparison"],
                       "generalized": c["generalized"], "rounds": len(res.log.rounds),
                       "fallbacks": res.log.fallbacks}
                rep.rows.append(row)
                if keep_transcripts:
                    rep.transcripts[(d, n, trial)] = res.transcript
                totals.append(len(res.transcript))
                rounds.append(len(res.log.rounds))
            mean = float(np.mean(totals))
            model = d ** 3 * max(math.log(d), 1.0) * math.log(max(n, 2))
            rep.summary.append({"d": d, "n": n, "dist": dist, "trials": trials, "mean_queries": mean,
                                "p95_queries": _p95(totals), "mean_rounds": float(np.mean(rounds)),
                                "ratio_model": mean / model, "ratio_n": mean / n,
                                "ratio_info": mean / (d * math.log(max(n, 2)))})
    return rep


def round_inference(H_unit: np.ndarray, x, k: int, rng: np.random.Generator,
                    cfg: LocateConfig | None = None) -> tuple[int, int]:
    """One round on an isotropic set: (members of H inferred, of which outside the sample).

    Counts |InferComp(+-S; x) & H| for a uniform sample S of size k.
    """
    cfg = cfg or LocateConfig()
    prep = prepare(H_unit)
    n, d = len(prep.rows), prep.d
    oracle = PointOracle(x)
    S = sorted(int(i) for i in rng.choice(n, size=min(k, n), replace=False))
    labels = {i: ask(oracle, label_query(prep.rows, i)) for i in S}
    groups = sort_by_inner_product(oracle, [Item(i, labels[i], 1.0) for i in S if labels[i]], prep.rows)
    in_S = set(S)
    rest = [h for h in range(n) if h not in in_S]
    forced = resolve_signs(d, round_conditions(prep, labels, groups), prep.ints, rest, cfg)
    return len(S) + len(forced), len(forced)


def bench_inference_rate(d: int, n: int, trials: int, cfg: LocateConfig | None = None,
                         dist: str = "sphere", seed: int = 0, k: int | None = None) -> BenchReport:
    """Fraction of an isotropic H inferred by one round, with a one-sided 99% lower bound."""
    cfg = cfg or LocateConfig()
    k = cfg.k(d) if k is None else k
    rep = BenchReport("inference_rate", columns=("d", "n", "dist", "seed", "trial", "k", "inferred",
                                                  "inferred_outside", "fraction"),
                      summary_columns=("d", "n", "dist", "k", "trials", "mean_fraction", "lower99",
                                       "mean_outside_fraction", "target"))
    fr, fo = [], []
    for trial in range(trials):
        rng = trial_rng(seed, d, n, trial)
        H = isotropic_instance(d, n, rng, dist)
        x = rng.standard_normal(d)
        total, outside = round_inference(H, x, k, rng, cfg)
        fr.append(total / n)
        fo.append(outside / max(n - min(k, n), 1))
        rep.rows.append({"d": d, "n": n, "dist": dist, "seed": seed, "trial": trial, "k": k,
                         "inferred": total, "inferred_outside": outside, "fraction": total / n})
    mean = float(np.mean(fr))
    sd = float(np.std(fr, ddof=1)) if trials > 1 else 0.0
    rep.summary.append({"d": d, "n": n, "dist": dist, "k": k, "trials": trials, "mean_fraction": mean,
                        "lower99": mean - Z99 * sd / math.sqrt(trials),
                        "mean_outside_fraction": float(np.mean(fo)), "target": 1 / (40 * d)})
    return rep


def subsample_floor(d: int, k: int) -> float:
    """Matrix-Chernoff lower bound 1 - d (99/100)^(k/d) on the success probability."""
    return 1.0 - d * 0.99 ** (k / d)


def bench_subsample_isotropy(d: int, n: int, k: int, trials: int, seed: int = 0,
                             level: float = 0.5) -> BenchReport:
    """How often a uniform k-subset of an isotropic set is ``level``-approximately isotropic."""
    rep = BenchReport("subsample_isotropy", columns=("d", "n", "k", "seed", "trial", "measure", "success"),
                      summary_columns=("d", "n", "k", "trials", "frequency", "floor"))
    rng0 = trial_rng(seed, d, n, k)
    H = isotropic_instance(d, n, rng0)
    hits = 0
    for trial in range(trials):
        rng = trial_rng(seed, d, n, k, trial)
        S = rng.choice(n, size=k, replace=False)
        c = isotropy_report(H[S]).c_level
        ok = c >= level
        hits += ok
        rep.rows.append({"d": d, "n": n, "k": k, "seed": seed, "trial": trial, "measure": float(c),
                         "success": int(ok)})
    rep.summary.append({"d": d, "n": n, "k": k, "trials": trials, "frequency": hits / trials,
                        "floor": subsample_floor(d, k)})
    return rep
