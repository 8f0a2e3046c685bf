import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from infocus.model import CodeUnit
from infocus.profiles import DefectProfile, MissingMetric, UnknownMetric
from infocus.rules import EmptyUnitList, evaluate_rule, parse_rule
from infocus.rules.selection import REL_TOL


def P(metric, **values):
    return DefectProfile(metric, {k: float(v) for k, v in values.items()})


def sel(rule, *profiles, units=None):
    units = units or sorted(profiles[0].values)
    return set(evaluate_rule(parse_rule(rule), profiles, units).selected)


DC = P("dc", A=5, B=3, C=1, D=1)


def test_pareto_example():
    assert sel("pareto(dc, 0.8)", DC) == {"A", "B"}


def test_pareto_zero():
    assert sel("pareto(dc, 0)", DC) == set()


def test_pareto_zero_mass():
    assert sel("pareto(dc, 0.9)", P("dc", A=0, B=0)) == set()


def test_pareto_full():
    assert sel("pareto(dc, 1)", DC) == {"A", "B", "C", "D"}


def test_top_tie_break_independent_of_input_order():
    dc = P("dc", A=3, B=3, C=1)
    for order in itertools.permutations("ABC"):
        assert sel("top(dc, 1)", dc, units=list(order)) == {"A"}


def test_top_k_beyond_unit_count():
    assert sel("top(dc, 10)", DC) == set("ABCD")


def test_threshold():
    assert sel("threshold(dd, >=, 20)", P("dd", A=40, B=5)) == {"A"}
    assert sel("threshold(dd, <, 5)", P("dd", A=40, B=5)) == set()
    assert sel("threshold(dd, <=, 5)", P("dd", A=40, B=5)) == {"B"}
    assert sel("threshold(dd, >, 5)", P("dd", A=40, B=5)) == {"A"}


def test_fracmax():
    assert sel("fracmax(dc, 0.5)", DC) == {"A", "B"}
    # 3 >= 0.6 * 5 exactly, even though 0.6 * 5 rounds to 3.0000000000000004
    assert sel("fracmax(dc, 0.6)", DC) == {"A", "B"}
    assert sel("fracmax(dc, 0.61)", DC) == {"A"}
    # all-zero metric: everything satisfies m >= f * 0
    assert sel("fracmax(dc, 0.5)", P("dc", A=0, B=0)) == {"A", "B"}


def test_union_of_singletons():
    dc = P("dc", A=5, B=1)
    cx = P("cx", A=1, B=9)
    assert sel("top(dc,1) | top(cx,1)", dc, cx) == {"A", "B"}
    assert sel("top(dc,1) & top(cx,1)", dc, cx) == set()
    assert sel("all() - top(cx,1)", dc, cx) == {"A"}


def test_ranking_uses_leftmost_metric():
    dc = P("dc", A=5, B=1, C=1)
    cx = P("cx", A=1, B=9, C=2)
    pri = evaluate_rule(parse_rule("top(cx, 1) | top(dc, 1)"), [dc, cx], ["A", "B", "C"], validity=2)
    assert pri.ranking == (("B", 9.0), ("C", 2.0), ("A", 1.0))
    assert pri.selected == {"A", "B"}
    assert pri.validity_at_evaluation == 2
    assert pri.selected_in_rank_order == ["B", "A"]


def test_all_only_rule_ranks_by_id():
    pri = evaluate_rule(parse_rule("all()"), [], ["b", "a", "c"])
    assert pri.ranking == (("a", 0.0), ("b", 0.0), ("c", 0.0))


def test_accepts_code_units():
    units = [CodeUnit("A", "a", 10, False), CodeUnit("B", "b", 10, False)]
    assert evaluate_rule(parse_rule("top(dc, 1)"), [P("dc", A=1, B=2)], units).selected == {"B"}


def test_errors():
    with pytest.raises(UnknownMetric):
        evaluate_rule(parse_rule("top(zz, 1)"), [DC], ["A"])
    with pytest.raises(EmptyUnitList):
        evaluate_rule(parse_rule("all()"), [DC], [])
    with pytest.raises(MissingMetric):
        evaluate_rule(parse_rule("top(dc, 1)"), [DC], ["A", "Z"])


# -- oracles and properties -------------------------------------------------

values_st = st.lists(st.integers(0, 20), min_size=1, max_size=10)
fraction_st = st.sampled_from([0.0, 0.1, 0.25, 0.3, 0.5, 0.6, 0.7, 0.75, 0.8, 0.9, 0.95, 1.0]) | st.floats(0, 1)


def profile_of(values, metric="dc"):
    return DefectProfile(metric, {f"u{i}": float(v) for i, v in enumerate(values)})


def min_cover_size(values, p):
    """Exhaustive: the fewest units whose metric sum reaches p of the total."""
    total = math.fsum(values)
    target = p * total - REL_TOL * abs(total)
    for k in range(len(values) + 1):
        for combo in itertools.combinations(values, k):
            if math.fsum(combo) >= target:
                return k
    return len(values)


@settings(max_examples=300)
@given(values_st, fraction_st)
def test_pareto_minimal_cardinality(values, p):
    prof = profile_of(values)
    chosen = sel(f"pareto(dc, {p!r})", prof, units=list(prof.values))
    total = math.fsum(values)
    if p == 0 or total == 0:
        assert chosen == set()
        return
    assert math.fsum(prof.values[u] for u in chosen) >= p * total - REL_TOL * total
    assert len(chosen) == min_cover_size(values, p)


@given(values_st, st.integers(1, 12), st.integers(1, 12))
def test_top_monotone(values, k1, k2):
    prof = profile_of(values)
    k1, k2 = sorted((k1, k2))
    assert sel(f"top(dc, {k1})", prof) <= sel(f"top(dc, {k2})", prof)


@given(values_st, fraction_st, fraction_st)
def test_pareto_monotone(values, p1, p2):
    prof = profile_of(values)
    p1, p2 = sorted((p1, p2))
    assert sel(f"pareto(dc, {p1!r})", prof) <= sel(f"pareto(dc, {p2!r})", prof)


@given(values_st, st.floats(-5, 25), st.floats(-5, 25))
def test_threshold_monotone(values, t1, t2):
    prof = profile_of(values)
    t1, t2 = sorted((t1, t2))
    assert sel(f"threshold(dc, >=, {t1!r})", prof) >= sel(f"threshold(dc, >=, {t2!r})", prof)


@given(
    st.lists(st.integers(0, 1000), min_size=1, max_size=10),
    st.sampled_from(["top(dc, 3)", "top(dc, 1)", "pareto(dc, 0.8)", "pareto(dc, 0.5)", "fracmax(dc, 0.5)", "fracmax(dc, 0.9)"]),
    st.floats(1e-3, 1e3),
)
def test_scale_invariance(values, rule, c):
    raw = profile_of(values)
    scaled = DefectProfile("dc", {u: v * c for u, v in raw.values.items()})
    a = evaluate_rule(parse_rule(rule), [raw], list(raw.values))
    b = evaluate_rule(parse_rule(rule), [scaled], list(raw.values))
    assert a.selected == b.selected
    assert [u for u, _ in a.ranking] == [u for u, _ in b.ranking]


def test_threshold_is_not_scale_invariant():
    raw = P("dd", A=10, B=30)
    scaled = P("dd", A=100, B=300)
    assert sel("threshold(dd, >=, 20)", raw) != sel("threshold(dd, >=, 20)", scaled)


@given(values_st, st.sampled_from(["top(dc, 2)", "pareto(dc, 0.7)", "fracmax(dc, 0.4)", "threshold(dc, >, 3)"]))
def test_set_algebra_identities(values, r):
    prof = profile_of(values)
    base = sel(r, prof)
    assert sel(f"{r} | none()", prof) == base
    assert sel(f"{r} & all()", prof) == base
    assert sel(f"{r} - ({r})", prof) == set()
