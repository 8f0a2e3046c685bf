"""Small builders for hand-made projects."""

from infocus.model import CodeUnit, ContextProfile, DefectRecord, Phase, ProjectData, TestEffortRecord


def unit(uid, size=100, inspected=True, complexity=None, effort=None):
    if inspected and effort is None:
        effort = size / 300 * 60
    return CodeUnit(uid, f"unit {uid}", size, inspected, complexity, effort)


def defects(unit_ids, phase=Phase.INSPECTION, prefix="D"):
    return tuple(DefectRecord(f"{prefix}{i}", u, phase) for i, u in enumerate(unit_ids, start=1))


def project(units, insp=(), hist=(), test=None, effort=None, run_id="r1", context=None):
    """``insp``/``hist``/``test`` are lists of unit ids, one entry per defect."""
    return ProjectData(
        run_id=run_id,
        context=ContextProfile.from_mapping(context or {"project": "p"}),
        units=tuple(units),
        inspection_defects=defects(insp, Phase.INSPECTION, "I"),
        historical_defects=defects(hist, Phase.HISTORICAL, "H"),
        test_defects=None if test is None else defects(test, Phase.TEST, "T"),
        test_effort=None if effort is None else tuple(TestEffortRecord(u, e) for u, e in effort.items()),
    )
