import pytest
from hypothesis import given

from infocus.rules import (
    BinOp,
    Pareto,
    RuleDomainError,
    RuleSyntaxError,
    Threshold,
    Top,
    parse_rule,
    render_rule,
    rule_from_ast,
)

from rule_strategies import trees


def test_top():
    r = parse_rule("top(dc, 2)")
    assert r.ast == Top("dc", 2)
    assert r.source == "top(dc, 2)"


def test_union_of_two_selectors():
    r = parse_rule("pareto(dc, 0.8) | threshold(dd, >=, 20)")
    assert r.ast == BinOp("|", Pareto("dc", 0.8), Threshold("dd", ">=", 20.0))


@pytest.mark.parametrize("text", ["top(dc, 0)", "top(dc, -3)", "pareto(dc, 1.5)", "fracmax(dd, -0.1)", "pareto(dc, 1e400)"])
def test_domain_errors(text):
    with pytest.raises(RuleDomainError):
        parse_rule(text)


@pytest.mark.parametrize(
    "text, position",
    [
        ("top(dc,", 7),
        ("top(dc, 2.5)", 8),
        ("bottom(dc, 1)", 0),
        ("top(dc, 1) |", 12),
        ("top(dc, 1) top(dd, 1)", 11),
        ("threshold(dd, =, 3)", 14),
        ("(all()", 6),
        ("all() $ none()", 6),
        ("", 0),
    ],
)
def test_syntax_errors_carry_position(text, position):
    with pytest.raises(RuleSyntaxError) as err:
        parse_rule(text)
    assert err.value.position == position
    assert err.value.expected


def test_precedence_and_associativity():
    a, b, c = "top(dc, 1)", "top(dd, 1)", "top(cx, 1)"
    # & binds tighter than |
    assert parse_rule(f"{a} | {b} & {c}").ast == BinOp("|", Top("dc", 1), BinOp("&", Top("dd", 1), Top("cx", 1)))
    # left associative
    assert parse_rule(f"{a} - {b} - {c}").ast == BinOp("-", BinOp("-", Top("dc", 1), Top("dd", 1)), Top("cx", 1))
    assert parse_rule(f"{a} - ({b} - {c})").ast == BinOp("-", Top("dc", 1), BinOp("-", Top("dd", 1), Top("cx", 1)))


def test_whitespace_insignificant():
    assert parse_rule("top( dc ,2 )") == parse_rule("top(dc,2)") == parse_rule("\ttop (dc , 2)\n")


def test_render_canonical():
    assert render_rule(parse_rule("top( dc ,2 )")) == "top(dc, 2)"
    assert render_rule(parse_rule("all()")) == "all()"
    assert render_rule(parse_rule("threshold(dd,>=,20)")) == "threshold(dd, >=, 20.0)"
    assert render_rule(parse_rule("(top(dc,1)|top(dd,1))&all()")) == "(top(dc, 1) | top(dd, 1)) & all()"


def test_render_union_round_trip():
    r = parse_rule("pareto(dc,0.8)|threshold(dd,>=,20)")
    assert parse_rule(render_rule(r)).ast == r.ast


def test_metrics_in_order():
    r = parse_rule("threshold(dd, >=, 5) | top(dc, 1) & top(dd, 2)")
    assert r.metrics() == ["dd", "dc"]
    assert parse_rule("all() - none()").metrics() == []


def test_source_kept_verbatim():
    text = "top(  dc,  2)"
    assert parse_rule(text).source == text


@given(trees)
def test_render_parse_round_trip(node):
    rule = rule_from_ast(node)
    again = parse_rule(render_rule(rule))
    assert again == rule
    assert render_rule(again) == render_rule(rule)
