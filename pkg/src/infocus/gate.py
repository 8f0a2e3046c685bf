"""Plausibility checks on inspection data before it is used for focusing.

The three checks and their default thresholds are a proposal of this tool,
not an established standard; tune them per organisation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import ProjectData


@dataclass(frozen=True)
class GateConfig:
    min_inspection_coverage: float = 0.75
    reading_rate_bounds: tuple[float, float] = (50.0, 600.0)
    min_total_inspection_defects: int = 1

    def __post_init__(self):
        if not 0.0 <= self.min_inspection_coverage <= 1.0:
            raise ValueError("min_inspection_coverage must lie in [0, 1]")
        lo, hi = self.reading_rate_bounds
        if lo > hi:
            raise ValueError("reading rate lower bound exceeds upper bound")
        if self.min_total_inspection_defects < 0:
            raise ValueError("min_total_inspection_defects must be non-negative")


@dataclass(frozen=True)
class GateCheck:
    check_id: str
    measured_value: float
    threshold: str
    passed: bool


@dataclass(frozen=True)
class GateReport:
    checks: tuple[GateCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def run_gate(p: ProjectData, cfg: GateConfig = GateConfig()) -> GateReport:
    total_loc = sum(u.size_loc for u in p.units)
    inspected = [u for u in p.units if u.inspected]
    inspected_loc = sum(u.size_loc for u in inspected)
    coverage = inspected_loc / total_loc if total_loc else 0.0
    coverage_ok = coverage >= cfg.min_inspection_coverage
    checks = [
        GateCheck(
            "COVERAGE",
            round(coverage, 4),
            f">= {cfg.min_inspection_coverage:.4f} of LOC inspected",
            coverage_ok,
        )
    ]

    lo, hi = cfg.reading_rate_bounds
    effort = math.fsum(u.inspection_effort_minutes or 0.0 for u in inspected)
    if effort > 0:
        rate = inspected_loc / (effort / 60)
        checks.append(GateCheck("READING_RATE", round(rate, 4), f"within [{lo:.4f}, {hi:.4f}] LOC/h", lo <= rate <= hi))
    elif not coverage_ok:
        checks.append(GateCheck("READING_RATE", 0.0, "skipped: no inspection effort and coverage already failing", True))
    else:
        # inspected code with zero recorded effort cannot be a plausible reading rate
        checks.append(GateCheck("READING_RATE", math.inf, f"within [{lo:.4f}, {hi:.4f}] LOC/h", False))

    n_defects = len(p.inspection_defects)
    checks.append(
        GateCheck(
            "DEFECT_COUNT",
            float(n_defects),
            f">= {cfg.min_total_inspection_defects} inspection defects",
            n_defects >= cfg.min_total_inspection_defects,
        )
    )
    return GateReport(tuple(checks))
