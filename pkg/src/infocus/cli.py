"""``infocus`` command line.

Exit codes: 0 ok, 1 quality gate failed, 2 input or I/O error,
3 rule parse error (or unknown metric), 4 missing test data.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from filelock import FileLock

from . import data_path
from .evaluation import (
    BenchmarkError,
    MissingEffortRecord,
    MissingTestData,
    SuccessCriterion,
    benchmark,
    judge,
    score,
)
from .gate import GateConfig, run_gate
from .ingest import FormatError, UnsupportedFormat, load_project, load_rules_file, parse_project, write_report
from .model import ProjectData, validate_project
from .profiles import CombineSpec, MissingMetric, NoInspectedUnits, UnknownMetric, compute_profiles
from .rules import (
    DuplicateOutcome,
    GridSpec,
    RuleError,
    ValidityLedger,
    evaluate_rule,
    generate_rule_grid,
    get_validity,
    parse_rule,
    record_outcome,
)

log = logging.getLogger("infocus")

EXIT_OK, EXIT_GATE, EXIT_INPUT, EXIT_RULE, EXIT_NO_TEST_DATA = 0, 1, 2, 3, 4
LEDGER_ENV = "INFOCUS_LEDGER"


class UsageError(Exception):
    """Bad invocation or configuration; maps to exit code 2."""


@dataclass
class CliConfig:
    gate: GateConfig = field(default_factory=GateConfig)
    combined: tuple[CombineSpec, ...] = ()
    criterion: SuccessCriterion = field(default_factory=SuccessCriterion)
    ledger_path: Optional[str] = None
    min_validity: Optional[int] = None


def load_config(text: str) -> CliConfig:
    """Flat ``key = value`` file; ``#`` comments. Unknown keys are rejected."""
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string("[infocus]\n" + text)
    except configparser.Error as exc:
        raise UsageError(f"config: {exc}") from exc
    raw = dict(cp["infocus"])
    gate = {}
    crit = {}
    combined = []
    cfg = CliConfig()
    try:
        for key, value in raw.items():
            if key == "gate.min_inspection_coverage":
                gate["min_inspection_coverage"] = float(value)
            elif key == "gate.reading_rate_min_loc_per_hour":
                gate["min_rate"] = float(value)
            elif key == "gate.reading_rate_max_loc_per_hour":
                gate["max_rate"] = float(value)
            elif key == "gate.min_total_inspection_defects":
                gate["min_total_inspection_defects"] = int(value)
            elif key == "criterion.min_effectiveness_ratio":
                crit["min_effectiveness_ratio"] = float(value)
            elif key == "criterion.min_effort_reduction":
                crit["min_effort_reduction"] = float(value)
            elif key == "ledger.path":
                cfg.ledger_path = value.strip() or None
            elif key == "min_validity":
                cfg.min_validity = int(value)
            elif key.startswith("combine.") and len(key) > len("combine."):
                combined.append(CombineSpec.parse(key[len("combine."):], value))
            else:
                raise UsageError(f"config: unknown key {key!r}")
        defaults = GateConfig()
        lo = gate.pop("min_rate", defaults.reading_rate_bounds[0])
        hi = gate.pop("max_rate", defaults.reading_rate_bounds[1])
        cfg.gate = GateConfig(reading_rate_bounds=(lo, hi), **gate)
        cfg.criterion = SuccessCriterion(**crit)
    except ValueError as exc:
        raise UsageError(f"config: {exc}") from exc
    cfg.combined = tuple(combined)
    return cfg


def _read_bytes(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _emit(payload: bytes) -> None:
    sys.stdout.buffer.write(payload)
    sys.stdout.flush()


def _project(args) -> ProjectData:
    return load_project(_read_bytes(args.project))


def _gated(args, p: ProjectData) -> bool:
    """Return False (after reporting) when the gate fails and --force is absent."""
    report = run_gate(p, args.cfg.gate)
    if report.passed:
        return True
    if args.force:
        print("warning: quality gate failed; continuing because of --force", file=sys.stderr)
        return True
    sys.stderr.write(write_report(report, "text").decode())
    print("error: quality gate failed; inspection data not used for focusing (use --force to override)", file=sys.stderr)
    return False


def _ledger_path(args) -> Optional[str]:
    return getattr(args, "ledger", None) or os.environ.get(LEDGER_ENV) or args.cfg.ledger_path


def _lock(path: str) -> FileLock:
    return FileLock(path + ".lock", timeout=30)


def _read_ledger(path: Optional[str]) -> ValidityLedger:
    if not path or not os.path.exists(path):
        return ValidityLedger()
    log.debug("reading ledger %s", path)
    with _lock(path):
        text = Path(path).read_text(encoding="utf-8")
    try:
        return ValidityLedger.from_json(text)
    except ValueError as exc:
        raise UsageError(f"ledger {path}: {exc}") from exc


def _append_outcome(path: str, p: ProjectData, assumption_id: str, success: bool) -> None:
    with _lock(path):
        ledger = ValidityLedger()
        if os.path.exists(path):
            try:
                ledger = ValidityLedger.from_json(Path(path).read_text(encoding="utf-8"))
            except ValueError as exc:
                raise UsageError(f"ledger {path}: {exc}") from exc
        ledger = record_outcome(ledger, p.context, assumption_id, p.run_id, success)
        directory = os.path.dirname(os.path.abspath(path))
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".ledger-", suffix=".json")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(ledger.to_json())
        os.replace(tmp, path)


def _named_rules(args) -> list[tuple[str, str]]:
    if getattr(args, "rule", None):
        return [(args.assumption_id or args.rule, args.rule)]
    text = _read_bytes(args.rules_file).decode("utf-8")
    named = load_rules_file(text)
    if not named:
        raise UsageError(f"{args.rules_file}: no rules found")
    return named


def _profiles_for(p: ProjectData, rules, cfg: CliConfig):
    metrics = []
    for _, r in rules:
        metrics.extend(r.metrics())
    return compute_profiles(p, dict.fromkeys(metrics), cfg.combined)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    p = parse_project(_read_bytes(args.project))
    report = validate_project(p)
    if args.format == "json":
        body = [{"code": v.code, "id": v.id, "message": v.message} for v in report]
        _emit((json.dumps({"valid": report.ok, "violations": body}, indent=2) + "\n").encode())
    else:
        lines = [f"{args.project}: {'valid' if report.ok else f'{len(report)} violation(s)'}"]
        lines += [f"  {v.code} {v.id}: {v.message}" for v in report]
        _emit(("\n".join(lines) + "\n").encode())
    return EXIT_OK if report.ok else EXIT_INPUT


def cmd_gate(args) -> int:
    report = run_gate(_project(args), args.cfg.gate)
    _emit(write_report(report, args.format))
    return EXIT_OK if report.passed else EXIT_GATE


def cmd_profile(args) -> int:
    p = _project(args)
    metrics = [m.strip() for m in args.metrics.split(",") if m.strip()]
    if not metrics:
        raise UsageError("--metrics needs at least one metric id")
    profiles = compute_profiles(p, metrics, args.cfg.combined)
    _emit(write_report([profiles[m] for m in metrics], args.format))
    return EXIT_OK


def cmd_prioritize(args) -> int:
    p = _project(args)
    named = [(name, parse_rule(src)) for name, src in _named_rules(args)]
    if not _gated(args, p):
        return EXIT_GATE
    profiles = _profiles_for(p, named, args.cfg)
    ledger = _read_ledger(_ledger_path(args))
    min_validity = args.min_validity if args.min_validity is not None else args.cfg.min_validity

    results = []
    for name, rule in named:
        # single --rule without --assumption-id has no assumption to look up
        assumption = args.assumption_id or (name if args.rules_file else None)
        validity = get_validity(ledger, p.context, assumption) if assumption else 0
        if min_validity is not None and validity < min_validity:
            continue
        results.append(evaluate_rule(rule, profiles, p.units, validity))
    _emit(write_report(results[0] if len(results) == 1 else results, args.format))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    p = _project(args)
    rule = parse_rule(args.rule)
    if args.record and not args.assumption_id:
        raise UsageError("--record needs --assumption-id")
    ledger_path = _ledger_path(args)
    if args.record and not ledger_path:
        raise UsageError(f"--record needs --ledger (or {LEDGER_ENV})")
    if not p.has_test_data:
        raise MissingTestData(f"run {p.run_id!r} has no test data; evaluation needs a post-analysis bundle")
    if not _gated(args, p):
        return EXIT_GATE
    profiles = _profiles_for(p, [("rule", rule)], args.cfg)
    validity = get_validity(_read_ledger(ledger_path), p.context, args.assumption_id) if args.assumption_id else 0
    report = score(evaluate_rule(rule, profiles, p.units, validity), p)
    if args.record:
        success = judge(report, args.cfg.criterion)
        _append_outcome(ledger_path, p, args.assumption_id, success)
        print(
            f"recorded {'success' if success else 'failure'} for {args.assumption_id!r} in run {p.run_id!r}",
            file=sys.stderr,
        )
    _emit(write_report(report, args.format))
    return EXIT_OK


def cmd_benchmark(args) -> int:
    p = _project(args)
    if args.grid:
        grid_file = data_path("grid120.json") if args.grid == "default" else args.grid
        try:
            spec = GridSpec.from_json(Path(grid_file).read_text(encoding="utf-8"))
        except OSError as exc:
            raise UsageError(f"cannot read grid {grid_file}: {exc.strerror or exc}") from exc
        except (ValueError, TypeError) as exc:
            raise UsageError(f"grid {grid_file}: {exc}") from exc
        named = generate_rule_grid(spec)
    else:
        named = [(name, parse_rule(src)) for name, src in _named_rules(args)]
    if not p.has_test_data:
        raise MissingTestData(f"run {p.run_id!r} has no test data; benchmarking needs a post-analysis bundle")
    if not _gated(args, p):
        return EXIT_GATE

    ledger = _read_ledger(_ledger_path(args))
    min_validity = args.min_validity if args.min_validity is not None else args.cfg.min_validity
    if min_validity is not None:
        named = [(n, r) for n, r in named if get_validity(ledger, p.context, n) >= min_validity]
    profiles = _profiles_for(p, named, args.cfg)
    log.debug("benchmarking %d rules over %d units", len(named), len(p.units))
    try:
        table = benchmark(named, p, profiles, lambda name: get_validity(ledger, p.context, name))
    except BenchmarkError as exc:
        raise exc.cause from exc

    if args.out:
        try:
            Path(args.out).write_bytes(write_report(table, "csv"))
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc.strerror or exc}") from exc
        top = type(table)(table.rows[:5])
        _emit(f"{len(table)} rules ranked; written to {args.out}\n".encode() + write_report(top, "text"))
    else:
        _emit(write_report(table, "csv" if args.format == "text" else args.format))
    return EXIT_OK


def cmd_validity(args) -> int:
    p = _project(args)
    ledger = _read_ledger(_ledger_path(args))
    if args.assumption_id:
        _emit(f"{get_validity(ledger, p.context, args.assumption_id)}\n".encode())
        return EXIT_OK
    key = p.context.key
    ids = sorted({e.assumption_id for e in ledger.entries if e.context_key == key})
    lines = [f"context: {key}"] + [f"  {a}: {get_validity(ledger, p.context, a)}" for a in ids]
    _emit(("\n".join(lines) + "\n").encode())
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value configuration file")
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("-v", "--verbose", action="store_true")

    gated = argparse.ArgumentParser(add_help=False)
    gated.add_argument("--force", action="store_true", help="proceed even when the quality gate fails")
    gated.add_argument("--ledger", help=f"validity ledger JSON file (env {LEDGER_ENV})")
    gated.add_argument("--assumption-id")
    gated.add_argument("--min-validity", type=int)

    parser = argparse.ArgumentParser(prog="infocus", description="Focus testing with inspection defect data.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help, parents=(common,)):
        sp = sub.add_parser(name, help=help, parents=list(parents))
        sp.add_argument("project", help="project bundle (JSON)")
        sp.set_defaults(func=func)
        return sp

    add("validate", cmd_validate, "check a project bundle for consistency")
    add("gate", cmd_gate, "run the inspection data quality gate")
    sp = add("profile", cmd_profile, "print defect profiles")
    sp.add_argument("--metrics", default="dc,dd", help="comma-separated metric ids")

    sp = add("prioritize", cmd_prioritize, "apply selection rules", (common, gated))
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--rule")
    src.add_argument("--rules-file")

    sp = add("evaluate", cmd_evaluate, "score a rule against recorded test outcomes", (common, gated))
    sp.add_argument("--rule", required=True)
    sp.add_argument("--record", action="store_true", help="append the judged outcome to the ledger")

    sp = add("benchmark", cmd_benchmark, "rank many rules against recorded test outcomes", (common, gated))
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--rules-file")
    src.add_argument("--grid", help="grid spec JSON file, or 'default' for the bundled 120-rule grid")
    sp.add_argument("--out", help="write the ranking table CSV here and print the top 5")

    sp = add("validity", cmd_validity, "show assumption validity for the project's context")
    sp.add_argument("--ledger", help=f"validity ledger JSON file (env {LEDGER_ENV})")
    sp.add_argument("--assumption-id")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        args.cfg = load_config(_read_bytes(args.config).decode("utf-8")) if args.config else CliConfig()
        return args.func(args)
    except (RuleError, UnknownMetric) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RULE
    except (MissingTestData, MissingEffortRecord) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_TEST_DATA
    except (UsageError, FormatError, UnsupportedFormat, DuplicateOutcome, MissingMetric, NoInspectedUnits) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except UnicodeDecodeError as exc:
        print(f"error: input is not UTF-8: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
