"""Post-analysis scoring: how a prioritization would have fared against full testing.

Efficiencies are defects per hour. For a selection that covers a fraction
``q`` of test defects while skipping a fraction ``r`` of test effort, the
relative efficiency gain is ``q / (1 - r) - 1``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .model import ProjectData
from .profiles import ProfileSet
from .rules.dsl import SelectionRule
from .rules.selection import Prioritization, evaluate_rule


class MissingTestData(ValueError):
    pass


class MissingEffortRecord(ValueError):
    def __init__(self, unit_id: str):
        super().__init__(f"no test effort record for unit {unit_id!r}")
        self.unit_id = unit_id


class ZeroTotalEffort(ValueError):
    pass


class DegenerateReduction(ValueError):
    pass


class BenchmarkError(RuntimeError):
    def __init__(self, rule_name: str, cause: Exception):
        super().__init__(f"rule {rule_name!r}: {cause}")
        self.rule_name = rule_name
        self.cause = cause


@dataclass(frozen=True)
class EvaluationReport:
    rule_source: str
    total_test_defects: int
    found_in_selected: int
    effectiveness_ratio: float
    total_effort_minutes: float
    selected_effort_minutes: float
    effort_reduction: float
    efficiency_full: float
    # None means undefined: nothing was selected, so no focused effort was spent
    efficiency_focused: Optional[float]
    efficiency_improvement: float


@dataclass(frozen=True)
class RankingRow:
    rule_name: str
    effectiveness_ratio: float
    effort_reduction: float
    efficiency_improvement: float


@dataclass(frozen=True)
class RankingTable:
    rows: tuple[RankingRow, ...] = ()

    def __len__(self):
        return len(self.rows)


@dataclass(frozen=True)
class SuccessCriterion:
    min_effectiveness_ratio: float = 0.95
    min_effort_reduction: float = 0.05

    def __post_init__(self):
        for name in ("min_effectiveness_ratio", "min_effort_reduction"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")


def efficiency_improvement_closed_form(effort_reduction: float, effectiveness_ratio: float) -> float:
    if effort_reduction == 1:
        raise DegenerateReduction("effort reduction of 1 leaves no focused effort")
    return effectiveness_ratio / (1 - effort_reduction) - 1


def _per_hour(defects: int, minutes: float) -> float:
    return defects / (minutes / 60)


def score(pri: Prioritization, p: ProjectData) -> EvaluationReport:
    if not p.has_test_data:
        raise MissingTestData(f"run {p.run_id!r} carries no test defects/effort")
    effort = {e.unit_id: e.effort_minutes for e in p.test_effort}
    for u in p.units:
        if u.id not in effort:
            raise MissingEffortRecord(u.id)
    total_effort = math.fsum(effort[u.id] for u in p.units)
    if total_effort <= 0:
        raise ZeroTotalEffort(f"run {p.run_id!r} has zero total test effort")

    per_unit = Counter(d.unit_id for d in p.test_defects)
    total = len(p.test_defects)
    found = sum(per_unit[u] for u in pri.selected)
    selected_effort = math.fsum(effort[u] for u in sorted(pri.selected))

    effectiveness = found / total if total else 1.0
    # ratio form keeps effort_reduction exact at 0 for a full selection
    reduction = 1 - selected_effort / total_effort
    efficiency_full = _per_hour(total, total_effort)
    if selected_effort > 0:
        efficiency_focused = _per_hour(found, selected_effort)
        if efficiency_full > 0:
            improvement = (efficiency_focused - efficiency_full) / efficiency_full
        else:
            # no test defects at all: effectiveness is 1 by convention
            improvement = efficiency_improvement_closed_form(reduction, effectiveness)
    else:
        efficiency_focused = None
        improvement = -1.0

    return EvaluationReport(
        rule_source=pri.rule_source,
        total_test_defects=total,
        found_in_selected=found,
        effectiveness_ratio=effectiveness,
        total_effort_minutes=total_effort,
        selected_effort_minutes=selected_effort,
        effort_reduction=reduction,
        efficiency_full=efficiency_full,
        efficiency_focused=efficiency_focused,
        efficiency_improvement=improvement,
    )


def judge(report: EvaluationReport, crit: SuccessCriterion = SuccessCriterion()) -> bool:
    return (
        report.effectiveness_ratio >= crit.min_effectiveness_ratio
        and report.effort_reduction >= crit.min_effort_reduction
    )


def sort_rows(rows) -> tuple[RankingRow, ...]:
    return tuple(sorted(rows, key=lambda r: (-r.efficiency_improvement, -r.effort_reduction, r.rule_name)))


def benchmark(
    rules: Sequence[tuple[str, SelectionRule]],
    p: ProjectData,
    profiles: ProfileSet,
    validity: Callable[[str], int] | None = None,
) -> RankingTable:
    """Evaluate and score every named rule; rows ordered best first."""
    rows = []
    for name, rule in rules:
        try:
            pri = evaluate_rule(rule, profiles, p.units, validity(name) if validity else 0)
            rep = score(pri, p)
        except Exception as exc:
            raise BenchmarkError(name, exc) from exc
        rows.append(RankingRow(name, rep.effectiveness_ratio, rep.effort_reduction, rep.efficiency_improvement))
    return RankingTable(sort_rows(rows))
