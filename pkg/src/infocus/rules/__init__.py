from .dsl import (
    All,
    BinOp,
    FracMax,
    Nothing,
    Pareto,
    RuleDomainError,
    RuleError,
    RuleSyntaxError,
    SelectionRule,
    Threshold,
    Top,
    parse_rule,
    render_rule,
    rule_from_ast,
)
from .grid import GridSpec, generate_rule_grid
from .ledger import (
    Assumption,
    DuplicateOutcome,
    LedgerEntry,
    ValidityLedger,
    context_key,
    get_validity,
    record_outcome,
)
from .selection import EmptyUnitList, Prioritization, evaluate_rule, rank

__all__ = [
    "All",
    "Assumption",
    "BinOp",
    "DuplicateOutcome",
    "EmptyUnitList",
    "FracMax",
    "GridSpec",
    "LedgerEntry",
    "Nothing",
    "Pareto",
    "Prioritization",
    "RuleDomainError",
    "RuleError",
    "RuleSyntaxError",
    "SelectionRule",
    "Threshold",
    "Top",
    "ValidityLedger",
    "context_key",
    "evaluate_rule",
    "generate_rule_grid",
    "get_validity",
    "parse_rule",
    "rank",
    "record_outcome",
    "render_rule",
    "rule_from_ast",
]
