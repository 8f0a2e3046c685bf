"""Selection-rule language.

Grammar::

    expr   := term { "|" term }
    term   := atom { ("&" | "-") atom }
    atom   := func | "(" expr ")"
    func   := top(metric, int) | pareto(metric, float) | fracmax(metric, float)
            | threshold(metric, cmp, float) | all() | none()
    cmp    := ">=" | ">" | "<=" | "<"

``&`` and ``-`` bind tighter than ``|``; all operators are left-associative.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterator, Union

COMPARATORS = (">=", ">", "<=", "<")
FAMILIES = ("top", "pareto", "threshold", "fracmax", "all", "none")


class RuleError(ValueError):
    pass


class RuleSyntaxError(RuleError):
    def __init__(self, position: int, expected: str, text: str = ""):
        found = repr(text[position:position + 10]) if position < len(text) else "end of input"
        super().__init__(f"at position {position}: expected {expected}, found {found}")
        self.position = position
        self.expected = expected


class RuleDomainError(RuleError):
    pass


@dataclass(frozen=True)
class Top:
    metric: str
    k: int

    def __post_init__(self):
        if isinstance(self.k, bool) or not isinstance(self.k, int) or self.k < 1:
            raise RuleDomainError(f"top(): k must be an integer >= 1, got {self.k!r}")


def _check_fraction(name: str, value: float) -> None:
    if not (math.isfinite(value) and 0.0 <= value <= 1.0):
        raise RuleDomainError(f"{name}(): fraction must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class Pareto:
    metric: str
    p: float

    def __post_init__(self):
        _check_fraction("pareto", self.p)


@dataclass(frozen=True)
class FracMax:
    metric: str
    f: float

    def __post_init__(self):
        _check_fraction("fracmax", self.f)


@dataclass(frozen=True)
class Threshold:
    metric: str
    cmp: str
    t: float

    def __post_init__(self):
        if self.cmp not in COMPARATORS:
            raise RuleDomainError(f"threshold(): unknown comparator {self.cmp!r}")
        if not math.isfinite(self.t):
            raise RuleDomainError("threshold(): value must be finite")


@dataclass(frozen=True)
class All:
    pass


@dataclass(frozen=True)
class Nothing:
    """The ``none()`` selector."""


@dataclass(frozen=True)
class BinOp:
    op: str  # "|", "&" or "-"
    left: "Node"
    right: "Node"


Node = Union[Top, Pareto, FracMax, Threshold, All, Nothing, BinOp]


@dataclass(frozen=True)
class SelectionRule:
    """A parsed rule. Equality is structural; ``source`` is kept verbatim for reports."""

    source: str
    ast: Node

    def __eq__(self, other):
        if not isinstance(other, SelectionRule):
            return NotImplemented
        return self.ast == other.ast

    def __hash__(self):
        return hash(self.ast)

    def metrics(self) -> list[str]:
        """Metric ids in left-to-right order of appearance, without repeats."""
        return list(dict.fromkeys(_metrics(self.ast)))

    def __str__(self):
        return render_rule(self)


def _metrics(node: Node) -> Iterator[str]:
    if isinstance(node, BinOp):
        yield from _metrics(node.left)
        yield from _metrics(node.right)
    elif hasattr(node, "metric"):
        yield node.metric


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<cmp>>=|<=|>|<)
  | (?P<punct>[(),|&-])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise RuleSyntaxError(pos, "a token", text)
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, expected: str):
        raise RuleSyntaxError(self.tok.pos, expected, self.text)

    def expect(self, kind: str, text: str | None = None) -> _Tok:
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            self.fail(repr(text) if text else kind)
        self.i += 1
        return t

    def at(self, kind: str, text: str) -> bool:
        return self.tok.kind == kind and self.tok.text == text

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "eof":
            self.fail("an operator or end of input")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.at("punct", "|"):
            self.i += 1
            node = BinOp("|", node, self.term())
        return node

    def term(self) -> Node:
        node = self.atom()
        while self.at("punct", "&") or self.at("punct", "-"):
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.atom())
        return node

    def atom(self) -> Node:
        if self.at("punct", "("):
            self.i += 1
            node = self.expr()
            self.expect("punct", ")")
            return node
        if self.tok.kind != "ident" or self.tok.text not in FAMILIES:
            self.fail("a selector (" + ", ".join(FAMILIES) + ") or '('")
        name = self.tok.text
        self.i += 1
        self.expect("punct", "(")
        if name in ("all", "none"):
            self.expect("punct", ")")
            return All() if name == "all" else Nothing()
        metric = self.expect("ident").text
        self.expect("punct", ",")
        if name == "top":
            k = self.integer()
            self.expect("punct", ")")
            return Top(metric, k)
        if name == "threshold":
            cmp = self.expect("cmp").text
            self.expect("punct", ",")
            t = self.number()
            self.expect("punct", ")")
            return Threshold(metric, cmp, t)
        value = self.number()
        self.expect("punct", ")")
        return Pareto(metric, value) if name == "pareto" else FracMax(metric, value)

    def integer(self) -> int:
        t = self.tok
        if t.kind != "num" or not re.fullmatch(r"[+-]?\d+", t.text):
            self.fail("an integer")
        self.i += 1
        return int(t.text)

    def number(self) -> float:
        t = self.expect("num")
        return float(t.text)


def parse_rule(text: str) -> SelectionRule:
    return SelectionRule(text, _Parser(text).parse())


def _fmt(x: float) -> str:
    # repr round-trips exactly through float()
    return repr(float(x))


_PREC = {"|": 1, "&": 2, "-": 2}


def _render(node: Node) -> str:
    if isinstance(node, Top):
        return f"top({node.metric}, {node.k})"
    if isinstance(node, Pareto):
        return f"pareto({node.metric}, {_fmt(node.p)})"
    if isinstance(node, FracMax):
        return f"fracmax({node.metric}, {_fmt(node.f)})"
    if isinstance(node, Threshold):
        return f"threshold({node.metric}, {node.cmp}, {_fmt(node.t)})"
    if isinstance(node, All):
        return "all()"
    if isinstance(node, Nothing):
        return "none()"
    prec = _PREC[node.op]
    left = _render(node.left)
    right = _render(node.right)
    if isinstance(node.left, BinOp) and _PREC[node.left.op] < prec:
        left = f"({left})"
    if isinstance(node.right, BinOp) and _PREC[node.right.op] <= prec:
        right = f"({right})"
    return f"{left} {node.op} {right}"


def render_rule(rule: SelectionRule | Node) -> str:
    node = rule.ast if isinstance(rule, SelectionRule) else rule
    return _render(node)


def rule_from_ast(node: Node) -> SelectionRule:
    return SelectionRule(_render(node), node)
