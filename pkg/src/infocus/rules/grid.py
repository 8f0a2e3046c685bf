from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from .dsl import FracMax, Pareto, SelectionRule, Threshold, Top, rule_from_ast

_CMP_NAMES = {">=": "ge", ">": "gt", "<=": "le", "<": "lt"}


@dataclass(frozen=True)
class GridSpec:
    """Parameter grid for bulk rule generation.

    Families are generated in the order top, pareto, fracmax, threshold; an
    empty parameter list switches that family off.
    """

    metrics: Sequence[str]
    top_ks: Sequence[int] = ()
    pareto_ps: Sequence[float] = ()
    fracmax_fs: Sequence[float] = ()
    threshold_specs: Sequence[tuple[str, float]] = field(default_factory=tuple)

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        unknown = set(d) - {"metrics", "top_ks", "pareto_ps", "fracmax_fs", "threshold_specs"}
        if unknown:
            raise ValueError(f"unknown grid keys: {', '.join(sorted(unknown))}")
        if not d.get("metrics"):
            raise ValueError("grid needs a non-empty 'metrics' list")
        return cls(
            metrics=tuple(d["metrics"]),
            top_ks=tuple(d.get("top_ks", ())),
            pareto_ps=tuple(float(x) for x in d.get("pareto_ps", ())),
            fracmax_fs=tuple(float(x) for x in d.get("fracmax_fs", ())),
            threshold_specs=tuple((c, float(t)) for c, t in d.get("threshold_specs", ())),
        )

    @classmethod
    def from_json(cls, text: str) -> "GridSpec":
        return cls.from_dict(json.loads(text))


def _num(x: float) -> str:
    return repr(float(x))


def generate_rule_grid(spec: GridSpec) -> list[tuple[str, SelectionRule]]:
    candidates = []
    for m in spec.metrics:
        for k in spec.top_ks:
            candidates.append((f"top_{m}_{k}", Top(m, k)))
    for m in spec.metrics:
        for p in spec.pareto_ps:
            candidates.append((f"pareto_{m}_{_num(p)}", Pareto(m, p)))
    for m in spec.metrics:
        for f in spec.fracmax_fs:
            candidates.append((f"fracmax_{m}_{_num(f)}", FracMax(m, f)))
    for m in spec.metrics:
        for cmp, t in spec.threshold_specs:
            candidates.append((f"threshold_{m}_{_CMP_NAMES.get(cmp, cmp)}{_num(t)}", Threshold(m, cmp, t)))

    out = []
    seen: set[str] = set()
    for name, node in candidates:
        rule = rule_from_ast(node)
        if rule.source in seen:
            continue
        seen.add(rule.source)
        out.append((name, rule))
    return out
