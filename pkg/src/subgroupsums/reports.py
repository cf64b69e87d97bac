"""The BoundReport row type shared by every checker."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

ASSERT = "assert"
REPORT = "report"
SLACK = 1e-6


def lg(x: float) -> float:
    """Base-2 logarithm floored at 1, so log factors never vanish for tiny arguments."""
    return max(math.log2(x), 1.0) if x > 0 else 1.0


@dataclass(frozen=True)
class BoundReport:
    name: str
    p: int
    t: int
    lhs: float
    rhs_shape: float
    mode: str = REPORT
    hypothesis_flags: dict[str, bool] = field(default_factory=dict)
    # not serialized; carries auxiliary values for callers and tests
    details: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.mode not in (ASSERT, REPORT):
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def ratio(self) -> float:
        lhs, rhs = float(self.lhs), float(self.rhs_shape)
        if rhs == 0:
            return 0.0 if lhs == 0 else math.inf
        return lhs / rhs

    @property
    def passed(self) -> bool:
        if self.mode == ASSERT:
            return float(self.lhs) <= float(self.rhs_shape) * (1 + SLACK)
        r = self.ratio
        return math.isfinite(r) and r >= 0

    def sort_key(self) -> tuple:
        return (self.p, self.t, self.name)
