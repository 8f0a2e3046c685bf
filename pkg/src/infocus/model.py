"""Domain types for one QA run and whole-project consistency checks.

All types are frozen dataclasses holding tuples, so a loaded project can be
shared freely between profile computations and rule evaluations. Structural
invariants are *not* enforced at construction time; ``validate_project``
reports them as data so callers can see every problem at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional


class Phase(str, Enum):
    INSPECTION = "inspection"
    TEST = "test"
    HISTORICAL = "historical"


SEVERITIES = ("minor", "major", "critical")


@dataclass(frozen=True)
class CodeUnit:
    id: str
    name: str
    size_loc: int
    inspected: bool
    complexity: Optional[float] = None
    inspection_effort_minutes: Optional[float] = None


@dataclass(frozen=True)
class DefectRecord:
    """A defect found by one QA activity, attributed to exactly one unit."""

    id: str
    unit_id: str
    phase: Phase
    severity: Optional[str] = None
    defect_type: Optional[str] = None


@dataclass(frozen=True)
class TestEffortRecord:
    __test__ = False  # keep pytest from collecting this as a test class

    unit_id: str
    effort_minutes: float


@dataclass(frozen=True)
class ContextProfile:
    """Context factors (project, domain, team, ...) that scope assumption validity."""

    factors: tuple[tuple[str, str], ...] = ()

    @classmethod
    def from_mapping(cls, factors: Mapping[str, str]) -> "ContextProfile":
        return cls(tuple(sorted(factors.items())))

    def as_dict(self) -> dict[str, str]:
        return dict(self.factors)

    @property
    def key(self) -> str:
        """Canonical form: sorted ``key=value`` pairs joined by ``;``."""
        return ";".join(f"{k}={v}" for k, v in sorted(self.factors))


@dataclass(frozen=True)
class ProjectData:
    run_id: str
    context: ContextProfile
    units: tuple[CodeUnit, ...]
    inspection_defects: tuple[DefectRecord, ...] = ()
    historical_defects: tuple[DefectRecord, ...] = ()
    test_defects: Optional[tuple[DefectRecord, ...]] = None
    test_effort: Optional[tuple[TestEffortRecord, ...]] = None

    @property
    def has_test_data(self) -> bool:
        return self.test_defects is not None and self.test_effort is not None

    def unit(self, unit_id: str) -> CodeUnit:
        for u in self.units:
            if u.id == unit_id:
                return u
        raise KeyError(unit_id)

    @property
    def unit_ids(self) -> tuple[str, ...]:
        return tuple(u.id for u in self.units)


@dataclass(frozen=True, order=True)
class Violation:
    code: str
    id: str
    message: str = field(compare=False)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return bool(self.violations)

    def __len__(self) -> int:
        return len(self.violations)

    def __iter__(self):
        return iter(self.violations)


def _duplicates(ids: Iterable[str]) -> list[str]:
    seen: set[str] = set()
    dups: set[str] = set()
    for i in ids:
        if i in seen:
            dups.add(i)
        seen.add(i)
    return sorted(dups)


def _check_defects(
    records: Iterable[DefectRecord],
    phase: Phase,
    units: Mapping[str, CodeUnit],
    out: list[Violation],
) -> None:
    records = list(records)
    for dup in _duplicates(r.id for r in records):
        out.append(Violation("DUPLICATE_DEFECT_ID", dup, f"defect id {dup!r} repeated in {phase.value} defects"))
    for r in records:
        if not r.id:
            out.append(Violation("EMPTY_DEFECT_ID", r.id, f"{phase.value} defect with empty id"))
        if r.phase is not phase:
            out.append(Violation("WRONG_PHASE", r.id, f"defect {r.id!r} has phase {r.phase.value}, expected {phase.value}"))
        if r.severity is not None and r.severity not in SEVERITIES:
            out.append(Violation("INVALID_SEVERITY", r.id, f"defect {r.id!r} has unknown severity {r.severity!r}"))
        unit = units.get(r.unit_id)
        if unit is None:
            out.append(Violation("DANGLING_UNIT_REF", r.unit_id, f"{phase.value} defect {r.id!r} references unknown unit {r.unit_id!r}"))
        elif phase is Phase.INSPECTION and not unit.inspected:
            out.append(Violation("UNINSPECTED_DEFECT_UNIT", r.id, f"inspection defect {r.id!r} on uninspected unit {r.unit_id!r}"))


def validate_project(p: ProjectData) -> ValidationReport:
    """Check every ProjectData invariant; violations come back sorted by (code, id)."""
    out: list[Violation] = []

    for k, _ in p.context.factors:
        if not k:
            out.append(Violation("EMPTY_CONTEXT_KEY", "", "context factor with empty key"))
    for dup in _duplicates(k for k, _ in p.context.factors):
        out.append(Violation("DUPLICATE_CONTEXT_KEY", dup, f"context key {dup!r} repeated"))

    for dup in _duplicates(u.id for u in p.units):
        out.append(Violation("DUPLICATE_UNIT_ID", dup, f"unit id {dup!r} declared more than once"))
    for u in p.units:
        if not u.id:
            out.append(Violation("EMPTY_UNIT_ID", u.id, "unit with empty id"))
        if u.size_loc < 1:
            out.append(Violation("INVALID_SIZE", u.id, f"unit {u.id!r} has size_loc {u.size_loc} < 1"))
        if u.complexity is not None and u.complexity < 0:
            out.append(Violation("NEGATIVE_COMPLEXITY", u.id, f"unit {u.id!r} has negative complexity"))
        if u.inspection_effort_minutes is not None and u.inspection_effort_minutes < 0:
            out.append(Violation("NEGATIVE_INSPECTION_EFFORT", u.id, f"unit {u.id!r} has negative inspection effort"))
        if u.inspected and u.inspection_effort_minutes is None:
            out.append(Violation("MISSING_INSPECTION_EFFORT", u.id, f"inspected unit {u.id!r} lacks inspection_effort_minutes"))

    units = {}
    for u in p.units:
        units.setdefault(u.id, u)

    _check_defects(p.inspection_defects, Phase.INSPECTION, units, out)
    _check_defects(p.historical_defects, Phase.HISTORICAL, units, out)
    if p.test_defects is not None:
        _check_defects(p.test_defects, Phase.TEST, units, out)

    if (p.test_defects is None) != (p.test_effort is None):
        missing = "test_effort" if p.test_effort is None else "test_defects"
        out.append(Violation("INCOMPLETE_TEST_BUNDLE", missing, f"{missing} missing; test data must come as a pair"))
    if p.test_effort is not None:
        for dup in _duplicates(e.unit_id for e in p.test_effort):
            out.append(Violation("DUPLICATE_EFFORT_RECORD", dup, f"more than one test effort record for {dup!r}"))
        for e in p.test_effort:
            if e.unit_id not in units:
                out.append(Violation("DANGLING_UNIT_REF", e.unit_id, f"test effort references unknown unit {e.unit_id!r}"))
            if not e.effort_minutes > 0:
                out.append(Violation("NONPOSITIVE_TEST_EFFORT", e.unit_id, f"test effort for {e.unit_id!r} must be positive"))

    return ValidationReport(tuple(sorted(out)))
