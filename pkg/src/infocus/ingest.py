"""Reading project bundles and rule lists; writing reports.

A project bundle is one JSON document per QA run::

    {"run_id": str, "context": {str: str},
     "units": [{"id", "name", "size_loc", "complexity"?, "inspected",
                "inspection_effort_minutes"?}],
     "inspection_defects": [{"id", "unit_id", "severity"?, "defect_type"?}],
     "historical_defects"?: [...], "test_defects"?: [...],
     "test_effort"?: [{"unit_id", "effort_minutes"}]}

Report output is deterministic: stable key order, floats with four
fractional digits, ``.`` as decimal separator regardless of locale.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Optional

from .evaluation import EvaluationReport, RankingTable
from .gate import GateReport
from .model import (
    CodeUnit,
    ContextProfile,
    DefectRecord,
    Phase,
    ProjectData,
    TestEffortRecord,
    validate_project,
)
from .profiles import DefectProfile
from .rules.selection import Prioritization

FORMATS = ("json", "csv", "text")


class FormatError(ValueError):
    def __init__(self, kind: str, location: str, message: str):
        assert kind in ("syntax", "schema", "reference")
        super().__init__(f"{kind} error at {location or '<document>'}: {message}")
        self.kind = kind
        self.location = location or "<document>"
        self.message = message


class UnsupportedFormat(ValueError):
    pass


# ---------------------------------------------------------------------------
# project bundles
# ---------------------------------------------------------------------------


def _no_duplicate_keys(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise FormatError("schema", k, f"duplicate key {k!r}")
        out[k] = v
    return out


def _field(obj: dict, name: str, types, where: str, required: bool = True):
    if name not in obj or obj[name] is None:
        if required:
            raise FormatError("schema", where, f"{name} missing")
        return None
    value = obj[name]
    # bool is an int subclass; never accept it where a number is expected
    if isinstance(value, bool) and bool not in (types if isinstance(types, tuple) else (types,)):
        raise FormatError("schema", f"{where}.{name}" if where else name, f"{name} has wrong type bool")
    if not isinstance(value, types):
        tname = types.__name__ if isinstance(types, type) else "/".join(t.__name__ for t in types)
        raise FormatError("schema", f"{where}.{name}" if where else name, f"{name} must be {tname}")
    if isinstance(value, float) and not math.isfinite(value):
        raise FormatError("schema", f"{where}.{name}", f"{name} must be finite")
    return value


_NUM = (int, float)


def _list(doc: dict, name: str, required: bool) -> Optional[list]:
    value = _field(doc, name, list, "", required)
    if value is not None:
        for i, item in enumerate(value):
            if not isinstance(item, dict):
                raise FormatError("schema", f"{name}[{i}]", "entry must be an object")
    return value


def _defects(items: list, section: str, phase: Phase) -> tuple[DefectRecord, ...]:
    out = []
    for i, d in enumerate(items):
        where = f"{section}[{i}]"
        out.append(
            DefectRecord(
                id=_field(d, "id", str, where),
                unit_id=_field(d, "unit_id", str, where),
                phase=phase,
                severity=_field(d, "severity", str, where, required=False),
                defect_type=_field(d, "defect_type", str, where, required=False),
            )
        )
    return tuple(out)


def parse_project(data: bytes | str) -> ProjectData:
    """Decode a bundle without checking cross-record invariants."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError("syntax", f"byte {exc.start}", "document is not UTF-8") from exc
    try:
        doc = json.loads(data, object_pairs_hook=_no_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise FormatError("syntax", f"line {exc.lineno} column {exc.colno}", exc.msg) from exc
    if not isinstance(doc, dict):
        raise FormatError("schema", "<document>", "top level must be an object")

    run_id = _field(doc, "run_id", str, "")
    ctx = _field(doc, "context", dict, "")
    for k, v in ctx.items():
        if not isinstance(v, str):
            raise FormatError("schema", f"context.{k}", "context values must be strings")
    units_raw = _list(doc, "units", True)
    insp_raw = _list(doc, "inspection_defects", True)
    hist_raw = _list(doc, "historical_defects", False)
    test_raw = _list(doc, "test_defects", False)
    effort_raw = _list(doc, "test_effort", False)

    units = []
    for i, u in enumerate(units_raw):
        where = f"units[{i}]"
        complexity = _field(u, "complexity", _NUM, where, required=False)
        effort = _field(u, "inspection_effort_minutes", _NUM, where, required=False)
        units.append(
            CodeUnit(
                id=_field(u, "id", str, where),
                name=_field(u, "name", str, where),
                size_loc=_field(u, "size_loc", int, where),
                inspected=_field(u, "inspected", bool, where),
                complexity=None if complexity is None else float(complexity),
                inspection_effort_minutes=None if effort is None else float(effort),
            )
        )

    efforts = None
    if effort_raw is not None:
        efforts = tuple(
            TestEffortRecord(
                unit_id=_field(e, "unit_id", str, f"test_effort[{i}]"),
                effort_minutes=float(_field(e, "effort_minutes", _NUM, f"test_effort[{i}]")),
            )
            for i, e in enumerate(effort_raw)
        )

    return ProjectData(
        run_id=run_id,
        context=ContextProfile.from_mapping(ctx),
        units=tuple(units),
        inspection_defects=_defects(insp_raw, "inspection_defects", Phase.INSPECTION),
        historical_defects=_defects(hist_raw or [], "historical_defects", Phase.HISTORICAL),
        test_defects=None if test_raw is None else _defects(test_raw, "test_defects", Phase.TEST),
        test_effort=efforts,
    )


def load_project(data: bytes | str) -> ProjectData:
    """Parse a bundle and reject it unless every project invariant holds."""
    p = parse_project(data)
    report = validate_project(p)
    if report.violations:
        refs = [v for v in report.violations if v.code == "DANGLING_UNIT_REF"]
        v = refs[0] if refs else report.violations[0]
        kind = "reference" if refs else "schema"
        raise FormatError(kind, v.id or v.code, f"{v.code}: {v.message}")
    return p


def _defect_dict(d: DefectRecord) -> dict:
    out: dict[str, Any] = {"id": d.id, "unit_id": d.unit_id}
    if d.severity is not None:
        out["severity"] = d.severity
    if d.defect_type is not None:
        out["defect_type"] = d.defect_type
    return out


def project_to_dict(p: ProjectData) -> dict:
    units = []
    for u in p.units:
        d: dict[str, Any] = {"id": u.id, "name": u.name, "size_loc": u.size_loc}
        if u.complexity is not None:
            d["complexity"] = u.complexity
        d["inspected"] = u.inspected
        if u.inspection_effort_minutes is not None:
            d["inspection_effort_minutes"] = u.inspection_effort_minutes
        units.append(d)
    doc: dict[str, Any] = {
        "run_id": p.run_id,
        "context": p.context.as_dict(),
        "units": units,
        "inspection_defects": [_defect_dict(d) for d in p.inspection_defects],
        "historical_defects": [_defect_dict(d) for d in p.historical_defects],
    }
    if p.test_defects is not None:
        doc["test_defects"] = [_defect_dict(d) for d in p.test_defects]
    if p.test_effort is not None:
        doc["test_effort"] = [{"unit_id": e.unit_id, "effort_minutes": e.effort_minutes} for e in p.test_effort]
    return doc


def dump_project(p: ProjectData) -> bytes:
    return (json.dumps(project_to_dict(p), indent=2) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# rule files
# ---------------------------------------------------------------------------


def load_rules_file(text: str) -> list[tuple[str, str]]:
    """``name: rule`` per line; ``#`` starts a comment line, blank lines are skipped."""
    out: list[tuple[str, str]] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, source = line.partition(":")
        name, source = name.strip(), source.strip()
        if not sep:
            raise FormatError("syntax", f"line {lineno}", "expected 'name: rule'")
        if not name or not source:
            raise FormatError("syntax", f"line {lineno}", "rule name and rule text must be non-empty")
        if name in seen:
            raise FormatError("schema", f"line {lineno}", f"duplicate rule name {name!r}")
        seen.add(name)
        out.append((name, source))
    return out


# ---------------------------------------------------------------------------
# report output
# ---------------------------------------------------------------------------


def fmt_num(x: float) -> str:
    if x is None:
        return "undefined"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    # "%" formatting ignores locale settings
    return "%.4f" % (x + 0.0)


def _json_value(v: Any, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if v is None or isinstance(v, (bool, str)):
        return json.dumps(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return json.dumps(fmt_num(v)) if math.isinf(v) else fmt_num(v)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_json_value(val, indent + 1)}" for k, val in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(v, (list, tuple)):
        if not v:
            return "[]"
        items = [pad + _json_value(val, indent + 1) for val in v]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _as_dict(report) -> dict:
    if isinstance(report, GateReport):
        return {
            "passed": report.passed,
            "checks": [
                {"check_id": c.check_id, "measured_value": c.measured_value, "threshold": c.threshold, "passed": c.passed}
                for c in report.checks
            ],
        }
    if isinstance(report, DefectProfile):
        return {
            "metric_id": report.metric_id,
            "domain_note": report.domain_note,
            "values": {u: float(v) for u, v in report.values.items()},
        }
    if isinstance(report, Prioritization):
        return {
            "rule_source": report.rule_source,
            "validity": report.validity_at_evaluation,
            "selected": report.selected_in_rank_order,
            "ranking": [{"unit_id": u, "score": float(s)} for u, s in report.ranking],
        }
    if isinstance(report, EvaluationReport):
        return {
            "rule_source": report.rule_source,
            "total_test_defects": report.total_test_defects,
            "found_in_selected": report.found_in_selected,
            "effectiveness_ratio": report.effectiveness_ratio,
            "total_effort_minutes": float(report.total_effort_minutes),
            "selected_effort_minutes": float(report.selected_effort_minutes),
            "effort_reduction": report.effort_reduction,
            "efficiency_full": report.efficiency_full,
            "efficiency_focused": report.efficiency_focused,
            "efficiency_improvement": report.efficiency_improvement,
        }
    if isinstance(report, RankingTable):
        return {
            "rows": [
                {
                    "rule_name": r.rule_name,
                    "effectiveness_ratio": r.effectiveness_ratio,
                    "effort_reduction": r.effort_reduction,
                    "efficiency_improvement": r.efficiency_improvement,
                }
                for r in report.rows
            ]
        }
    raise UnsupportedFormat(f"no writer for {type(report).__name__}")


def _text(report) -> str:
    if isinstance(report, GateReport):
        lines = [f"gate: {'PASS' if report.passed else 'FAIL'}"]
        for c in report.checks:
            lines.append(f"  {c.check_id:<13} {fmt_num(c.measured_value):>12}  {c.threshold}  [{'ok' if c.passed else 'FAIL'}]")
        return "\n".join(lines) + "\n"
    if isinstance(report, DefectProfile):
        lines = [f"profile {report.metric_id} ({report.domain_note})"]
        lines += [f"  {u}  {fmt_num(float(v))}" for u, v in report.values.items()]
        return "\n".join(lines) + "\n"
    if isinstance(report, Prioritization):
        lines = [
            f"rule: {report.rule_source}",
            f"validity: {report.validity_at_evaluation}",
            f"selected: {', '.join(report.selected_in_rank_order) or '(none)'}",
            "ranking:",
        ]
        for i, (u, s) in enumerate(report.ranking, start=1):
            mark = "*" if u in report.selected else " "
            lines.append(f"  {i:>3}. {mark} {u}  {fmt_num(s)}")
        return "\n".join(lines) + "\n"
    if isinstance(report, EvaluationReport):
        d = _as_dict(report)
        lines = []
        for k, v in d.items():
            lines.append(f"{k}: {v if isinstance(v, (str, int)) else fmt_num(v)}")
        return "\n".join(lines) + "\n"
    if isinstance(report, RankingTable):
        lines = [f"{'rule_name':<32} {'effectiveness':>13} {'effort_red':>10} {'eff_improv':>10}"]
        for r in report.rows:
            lines.append(
                f"{r.rule_name:<32} {fmt_num(r.effectiveness_ratio):>13} "
                f"{fmt_num(r.effort_reduction):>10} {fmt_num(r.efficiency_improvement):>10}"
            )
        return "\n".join(lines) + "\n"
    raise UnsupportedFormat(f"no writer for {type(report).__name__}")


def _csv(report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if isinstance(report, DefectProfile):
        w.writerow(["unit_id", "metric", "value"])
        for u, v in report.values.items():
            w.writerow([u, report.metric_id, fmt_num(float(v))])
    elif isinstance(report, RankingTable):
        w.writerow(["rule_name", "effectiveness_ratio", "effort_reduction", "efficiency_improvement"])
        for r in report.rows:
            w.writerow([r.rule_name, fmt_num(r.effectiveness_ratio), fmt_num(r.effort_reduction), fmt_num(r.efficiency_improvement)])
    else:
        raise UnsupportedFormat(f"csv output is not defined for {type(report).__name__}")
    return buf.getvalue()


def write_report(report, format: str = "json") -> bytes:
    """Serialize a report, or a list of same-typed reports, to bytes.

    csv is only defined for DefectProfile and RankingTable. Lists become a
    JSON array, blank-line separated text blocks, or one csv with a single
    header.
    """
    if format not in FORMATS:
        raise UnsupportedFormat(f"unknown format {format!r}")
    many = isinstance(report, (list, tuple))
    items = list(report) if many else [report]
    if format == "json":
        payload = [_as_dict(r) for r in items] if many else _as_dict(report)
        out = _json_value(payload) + "\n"
    elif format == "text":
        out = "\n".join(_text(r) for r in items)
    else:
        chunks = [_csv(r) for r in items]
        out = chunks[0] + "".join(c.split("\n", 1)[1] for c in chunks[1:]) if chunks else ""
    return out.encode("utf-8")
