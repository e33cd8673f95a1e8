"""Locator configuration."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class LocateConfig:
    """Tuning knobs shared by the randomized and deterministic locators.

    ``k_sample``, ``universal_s`` and ``universal_t`` are derived from the
    dimension through ``c_k``, ``c_s`` and ``c_t`` unless given explicitly.
    """

    k_sample: int | None = None
    c_k: float = 1.0
    target_c: float = 0.99
    forster_max_iters: int = 500
    forster_stall: int | None = 50
    min_progress: int = 1
    seed: int = 0
    universal_s: int | None = None
    c_s: float = 1.0
    universal_t: int | None = None
    c_t: float = 1.0
    universal_candidates: int = 20
    verify_limit: int = 200_000
    size_guard: int = 1_000_000
    max_cell_rays: int = 20_000
    dd_max_dim: int = 8
    scale_bits: int = 20

    def k(self, d: int) -> int:
        if self.k_sample is not None:
            return self.k_sample
        return math.ceil(self.c_k * d * d * math.log(d + 2))

    def s(self, d: int) -> int:
        if self.universal_s is not None:
            return self.universal_s
        return math.ceil(self.c_s * d ** 3 * math.log(d + 2))

    def t(self, d: int) -> int:
        if self.universal_t is not None:
            return self.universal_t
        return math.ceil(self.c_t * d * d * math.log(d + 2))

    def validate(self, d: int) -> "LocateConfig":
        if self.k(d) < d + 1:
            raise ValueError(f"k_sample={self.k(d)} must be at least d+1={d + 1}")
        if self.t(d) > self.s(d):
            raise ValueError(f"universal_t={self.t(d)} exceeds universal_s={self.s(d)}")
        if not 0.0 < self.target_c < 1.0:
            raise ValueError("target_c must lie in (0, 1)")
        if self.min_progress < 0:
            raise ValueError("min_progress must be nonnegative")
        return self

    def with_(self, **changes) -> "LocateConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "LocateConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown configuration keys: {sorted(unknown)}")
        return cls(**data)
