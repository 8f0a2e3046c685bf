from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from typing import Mapping, Sequence

from ..model import CodeUnit
from ..profiles import DefectProfile, MissingMetric, ProfileSet, UnknownMetric, as_profile_map
from .dsl import All, BinOp, FracMax, Node, Nothing, Pareto, SelectionRule, Threshold, Top

# Relative slack for comparisons against derived targets (p * total,
# f * max) so that float rounding cannot flip a boundary case.
REL_TOL = 1e-9

_CMP = {">=": operator.ge, ">": operator.gt, "<=": operator.le, "<": operator.lt}


class EmptyUnitList(ValueError):
    pass


@dataclass(frozen=True)
class Prioritization:
    rule_source: str
    ranking: tuple[tuple[str, float], ...]
    selected: frozenset[str]
    validity_at_evaluation: int = 0

    @property
    def selected_in_rank_order(self) -> list[str]:
        return [u for u, _ in self.ranking if u in self.selected]


def rank(values: Mapping[str, float], unit_ids: Sequence[str]) -> list[str]:
    """Metric descending, ties by unit id ascending."""
    return sorted(unit_ids, key=lambda u: (-values[u], u))


def select_top(values: Mapping[str, float], unit_ids: Sequence[str], k: int) -> set[str]:
    return set(rank(values, unit_ids)[:k])


def select_pareto(values: Mapping[str, float], unit_ids: Sequence[str], p: float) -> set[str]:
    """Shortest ranked prefix whose cumulative metric reaches ``p`` of the total."""
    total = math.fsum(values[u] for u in unit_ids)
    target = p * total - REL_TOL * abs(total)
    if target <= 0:
        # covers p == 0 and zero total mass: the empty prefix already qualifies
        return set()
    ordered = rank(values, unit_ids)
    picked: list[str] = []
    cum: list[float] = []
    for u in ordered:
        picked.append(u)
        cum.append(values[u])
        if math.fsum(cum) >= target:
            return set(picked)
    return set(ordered)


def select_fracmax(values: Mapping[str, float], unit_ids: Sequence[str], f: float) -> set[str]:
    top = max(values[u] for u in unit_ids)
    target = f * top - REL_TOL * abs(top)
    return {u for u in unit_ids if values[u] >= target}


def select_threshold(values: Mapping[str, float], unit_ids: Sequence[str], cmp: str, t: float) -> set[str]:
    fn = _CMP[cmp]
    return {u for u in unit_ids if fn(values[u], t)}


def _select(node: Node, profiles: Mapping[str, DefectProfile], unit_ids: Sequence[str]) -> set[str]:
    if isinstance(node, All):
        return set(unit_ids)
    if isinstance(node, Nothing):
        return set()
    if isinstance(node, BinOp):
        left = _select(node.left, profiles, unit_ids)
        right = _select(node.right, profiles, unit_ids)
        if node.op == "|":
            return left | right
        if node.op == "&":
            return left & right
        return left - right
    values = profiles[node.metric].values
    if isinstance(node, Top):
        return select_top(values, unit_ids, node.k)
    if isinstance(node, Pareto):
        return select_pareto(values, unit_ids, node.p)
    if isinstance(node, FracMax):
        return select_fracmax(values, unit_ids, node.f)
    if isinstance(node, Threshold):
        return select_threshold(values, unit_ids, node.cmp, node.t)
    raise TypeError(f"unexpected rule node {node!r}")


def evaluate_rule(
    rule: SelectionRule,
    profiles: ProfileSet,
    units: Sequence[CodeUnit] | Sequence[str],
    validity: int = 0,
) -> Prioritization:
    """Apply ``rule`` to the profiles of ``units``.

    The ranking covers every unit and is ordered by the leftmost metric the
    rule mentions; rules built only from ``all()``/``none()`` rank by unit id
    with score 0. ``selected`` is the authoritative output.
    """
    unit_ids = [u.id if isinstance(u, CodeUnit) else u for u in units]
    if not unit_ids:
        raise EmptyUnitList("cannot prioritize an empty unit list")
    pmap = as_profile_map(profiles)
    metrics = rule.metrics()
    for m in metrics:
        if m not in pmap:
            raise UnknownMetric(m)
        for u in unit_ids:
            if u not in pmap[m].values:
                raise MissingMetric(m, u)

    selected = _select(rule.ast, pmap, unit_ids)
    if metrics:
        scores = pmap[metrics[0]].values
        ranking = tuple((u, float(scores[u])) for u in rank(scores, unit_ids))
    else:
        ranking = tuple((u, 0.0) for u in sorted(unit_ids))
    return Prioritization(rule.source, ranking, frozenset(selected), validity)
