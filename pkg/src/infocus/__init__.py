"""Inspection-driven focusing of testing activities."""

from importlib.resources import files as _files

from .evaluation import (
    EvaluationReport,
    RankingTable,
    SuccessCriterion,
    benchmark,
    efficiency_improvement_closed_form,
    judge,
    score,
)
from .gate import GateConfig, GateReport, run_gate
from .ingest import FormatError, load_project, load_rules_file, write_report
from .model import CodeUnit, ContextProfile, DefectRecord, ProjectData, TestEffortRecord, validate_project
from .profiles import CombineSpec, DefectProfile, compute_profiles
from .rules import Prioritization, ValidityLedger, evaluate_rule, get_validity, parse_rule, record_outcome, render_rule

__version__ = "0.1.0"


def data_path(name: str):
    """Path to a bundled data file (``figure3.json``, ``synthetic50.json``, ``grid120.json``, ...)."""
    return _files("infocus") / "data" / name
