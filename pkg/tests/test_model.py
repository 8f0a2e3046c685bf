import dataclasses

import pytest

from infocus.model import DefectRecord, Phase, TestEffortRecord, validate_project

from helpers import project, unit


def four_units():
    return project(
        [unit("c1"), unit("c2"), unit("c3"), unit("c4")],
        insp=["c1", "c2", "c2", "c3"],
        test=["c3"],
        effort={"c1": 10, "c2": 10, "c3": 10, "c4": 10},
    )


def test_well_formed_project_has_empty_report():
    report = validate_project(four_units())
    assert report.ok
    assert list(report) == []


def test_four_class_sample_is_valid(figure3):
    assert validate_project(figure3).ok


def test_dangling_unit_reference():
    p = four_units()
    p = dataclasses.replace(p, inspection_defects=p.inspection_defects + (DefectRecord("Ix", "X", Phase.INSPECTION),))
    report = validate_project(p)
    assert [(v.code, v.id) for v in report] == [("DANGLING_UNIT_REF", "X")]


def test_duplicate_unit_id():
    p = project([unit("c1"), unit("c2"), unit("c2"), unit("c3")])
    assert [(v.code, v.id) for v in validate_project(p)] == [("DUPLICATE_UNIT_ID", "c2")]


@pytest.mark.parametrize(
    "p, code",
    [
        (project([unit("a", size=0)]), "INVALID_SIZE"),
        (project([unit("a", inspected=False)], insp=["a"]), "UNINSPECTED_DEFECT_UNIT"),
        (project([unit("a", complexity=-1)]), "NEGATIVE_COMPLEXITY"),
        (project([unit("a")], test=["a"]), "INCOMPLETE_TEST_BUNDLE"),
        (project([unit("a")], effort={"a": 0}, test=[]), "NONPOSITIVE_TEST_EFFORT"),
        (project([unit("")]), "EMPTY_UNIT_ID"),
    ],
)
def test_single_invariant_violations(p, code):
    assert [v.code for v in validate_project(p)] == [code]


def test_inspected_unit_needs_effort():
    from infocus.model import CodeUnit

    p = project([CodeUnit("a", "a", 10, True)])
    assert [v.code for v in validate_project(p)] == ["MISSING_INSPECTION_EFFORT"]


def test_duplicate_ids_only_within_phase():
    # the same id may appear once per phase
    p = project([unit("a")], insp=["a"], hist=["a"])
    p = dataclasses.replace(p, historical_defects=(DefectRecord("I1", "a", Phase.HISTORICAL),))
    assert validate_project(p).ok
    p = dataclasses.replace(p, inspection_defects=p.inspection_defects * 2)
    assert [(v.code, v.id) for v in validate_project(p)] == [("DUPLICATE_DEFECT_ID", "I1")]


def test_duplicate_effort_record():
    p = project([unit("a")], test=[], effort={"a": 5})
    p = dataclasses.replace(p, test_effort=p.test_effort + (TestEffortRecord("a", 3),))
    assert [(v.code, v.id) for v in validate_project(p)] == [("DUPLICATE_EFFORT_RECORD", "a")]


def test_report_order_is_by_code_then_id():
    p = project([unit("b", size=0), unit("a", size=0), unit("a")], insp=["zz", "yy"])
    codes = [(v.code, v.id) for v in validate_project(p)]
    assert codes == sorted(codes)
    assert codes[0] == ("DANGLING_UNIT_REF", "yy")


def test_validation_is_deterministic():
    p = project([unit("b", size=0), unit("a", size=0)], insp=["zz", "yy", "a"])
    assert validate_project(p) == validate_project(p)


def test_context_key_is_canonical():
    a = project([unit("a")], context={"team": "t", "project": "p"})
    b = project([unit("a")], context={"project": "p", "team": "t"})
    assert a.context.key == b.context.key == "project=p;team=t"
