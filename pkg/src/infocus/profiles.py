"""Per-unit metric profiles consumed by selection rules.

Built-in metric ids:

    dc   inspection defect content (count per unit)
    dd   inspection defect density, defects per KLOC
    loc  size in lines of code
    cx   complexity (e.g. McCabe), only when every unit carries one
    hd   historical defect count
    est  defect content with uninspected units extrapolated from the
         pooled density of the inspected ones

Combined profiles (``CombineSpec``) add weighted sums of min-max normalized
base profiles under a caller-chosen id.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

from .model import ProjectData

BUILTIN_METRICS = ("dc", "dd", "loc", "cx", "hd", "est")


class UnknownMetric(LookupError):
    def __init__(self, metric_id: str):
        super().__init__(f"unknown metric {metric_id!r}")
        self.metric_id = metric_id


class MissingMetric(ValueError):
    def __init__(self, metric_id: str, unit_id: str):
        super().__init__(f"metric {metric_id!r} missing for unit {unit_id!r}")
        self.metric_id = metric_id
        self.unit_id = unit_id


class NoInspectedUnits(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DefectProfile:
    metric_id: str
    values: Mapping[str, float]
    domain_note: str = "all units"

    def __getitem__(self, unit_id: str) -> float:
        return self.values[unit_id]

    def __eq__(self, other):
        if not isinstance(other, DefectProfile):
            return NotImplemented
        return self.metric_id == other.metric_id and dict(self.values) == dict(other.values)

    __hash__ = None


@dataclass(frozen=True)
class CombineSpec:
    id: str
    terms: tuple[tuple[str, float], ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError(f"combined profile {self.id!r} needs at least one term")
        for metric, weight in self.terms:
            if not math.isfinite(weight):
                raise ValueError(f"weight for {metric!r} in {self.id!r} is not finite")
        if self.id in BUILTIN_METRICS:
            raise ValueError(f"combined profile id {self.id!r} shadows a built-in metric")

    @classmethod
    def parse(cls, id: str, text: str) -> "CombineSpec":
        """Parse ``"dc:1, cx:0.5"`` style term lists."""
        terms = []
        for chunk in text.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            metric, sep, weight = chunk.partition(":")
            metric = metric.strip()
            w = float(weight) if sep else 1.0
            terms.append((metric, w))
        return cls(id, tuple(terms))


def _counts(p: ProjectData, records) -> dict[str, float]:
    c = Counter(r.unit_id for r in records)
    return {u.id: float(c.get(u.id, 0)) for u in p.units}


def defect_content(p: ProjectData) -> DefectProfile:
    return DefectProfile("dc", _counts(p, p.inspection_defects), "all units; uninspected units carry 0")


def defect_density(p: ProjectData) -> DefectProfile:
    dc = _counts(p, p.inspection_defects)
    values = {u.id: dc[u.id] / (u.size_loc / 1000) for u in p.units}
    return DefectProfile("dd", values, "all units; defects per KLOC; uninspected units carry 0")


def product_metric(p: ProjectData, which: str) -> DefectProfile:
    if which == "loc":
        return DefectProfile("loc", {u.id: float(u.size_loc) for u in p.units})
    if which == "cx":
        values = {}
        for u in p.units:
            if u.complexity is None:
                raise MissingMetric("cx", u.id)
            values[u.id] = float(u.complexity)
        return DefectProfile("cx", values)
    raise UnknownMetric(which)


def historical_metric(p: ProjectData) -> DefectProfile:
    return DefectProfile("hd", _counts(p, p.historical_defects))


def estimate_defects(p: ProjectData) -> DefectProfile:
    inspected = [u for u in p.units if u.inspected]
    if not inspected:
        raise NoInspectedUnits("defect estimation needs at least one inspected unit")
    dc = _counts(p, p.inspection_defects)
    # pooled density over inspected units, defects per KLOC
    density = math.fsum(dc[u.id] for u in inspected) / math.fsum(u.size_loc / 1000 for u in inspected)
    values = {
        u.id: dc[u.id] if u.inspected else density * u.size_loc / 1000
        for u in p.units
    }
    return DefectProfile("est", values, "all units; uninspected units extrapolated from pooled inspected density")


def _normalize(profile: DefectProfile, unit_ids: Sequence[str]) -> dict[str, float]:
    vals = [profile.values[u] for u in unit_ids]
    lo, hi = min(vals), max(vals)
    if hi == lo:
        return {u: 0.0 for u in unit_ids}
    span = hi - lo
    return {u: (profile.values[u] - lo) / span for u in unit_ids}


ProfileSet = Union[Mapping[str, DefectProfile], Iterable[DefectProfile]]


def as_profile_map(profiles: ProfileSet) -> dict[str, DefectProfile]:
    if isinstance(profiles, Mapping):
        return dict(profiles)
    return {pr.metric_id: pr for pr in profiles}


def combine(p: ProjectData, spec: CombineSpec, base: ProfileSet) -> DefectProfile:
    base = as_profile_map(base)
    unit_ids = p.unit_ids
    combined = dict.fromkeys(unit_ids, 0.0)
    for metric, weight in spec.terms:
        profile = base.get(metric)
        if profile is None:
            raise UnknownMetric(metric)
        for u in unit_ids:
            if u not in profile.values:
                raise MissingMetric(metric, u)
        norm = _normalize(profile, unit_ids)
        for u in unit_ids:
            combined[u] += weight * norm[u]
    terms = ", ".join(f"{m}:{w:g}" for m, w in spec.terms)
    return DefectProfile(spec.id, combined, f"all units; min-max combination of {terms}")


_BUILDERS = {
    "dc": defect_content,
    "dd": defect_density,
    "loc": lambda p: product_metric(p, "loc"),
    "cx": lambda p: product_metric(p, "cx"),
    "hd": historical_metric,
    "est": estimate_defects,
}


def compute_profiles(
    p: ProjectData,
    metric_ids: Iterable[str],
    combined: Iterable[CombineSpec] = (),
) -> dict[str, DefectProfile]:
    """Compute the requested profiles, pulling in whatever combined ones depend on."""
    specs = {s.id: s for s in combined}
    out: dict[str, DefectProfile] = {}

    def resolve(metric: str, stack: tuple[str, ...] = ()) -> DefectProfile:
        if metric in out:
            return out[metric]
        if metric in _BUILDERS:
            out[metric] = _BUILDERS[metric](p)
        elif metric in specs:
            if metric in stack:
                raise ValueError(f"combined profile {metric!r} refers to itself")
            spec = specs[metric]
            base = {m: resolve(m, stack + (metric,)) for m, _ in spec.terms}
            out[metric] = combine(p, spec, base)
        else:
            raise UnknownMetric(metric)
        return out[metric]

    for m in metric_ids:
        resolve(m)
    return out
