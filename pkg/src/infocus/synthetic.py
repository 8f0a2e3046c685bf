"""Synthetic QA runs for benchmarking rule sets.

Each unit gets a latent defect-proneness drawn independently of its size and
complexity. Inspection and test defect counts are both Poisson in that
latent value, so inspection metrics predict test defects while size and
complexity do not. Test effort grows with size, which makes size-based
focusing expensive. This is a property of the generator, chosen to exercise
the benchmark, not a statement about real projects.
"""

from __future__ import annotations

import numpy as np

from .model import CodeUnit, ContextProfile, DefectRecord, Phase, ProjectData, TestEffortRecord


def generate_correlated_project(n_units: int = 50, seed: int = 7, run_id: str | None = None) -> ProjectData:
    rng = np.random.default_rng(seed)
    width = max(2, len(str(n_units)))
    ids = [f"u{i:0{width}d}" for i in range(1, n_units + 1)]

    sizes = rng.integers(80, 1500, size=n_units)
    complexity = rng.integers(1, 60, size=n_units)
    proneness = rng.lognormal(mean=0.0, sigma=1.0, size=n_units)
    reading_rate = rng.uniform(150, 450, size=n_units)  # LOC per hour

    insp_counts = rng.poisson(1.5 * proneness)
    test_counts = rng.poisson(1.2 * proneness)
    hist_counts = rng.poisson(0.5 * proneness + 0.2)
    test_effort = 20 + sizes / 25 + rng.uniform(0, 10, size=n_units)

    units = tuple(
        CodeUnit(
            id=uid,
            name=f"module_{uid}",
            size_loc=int(sizes[i]),
            inspected=True,
            complexity=float(complexity[i]),
            inspection_effort_minutes=round(float(sizes[i] / reading_rate[i] * 60), 1),
        )
        for i, uid in enumerate(ids)
    )

    def records(counts, phase: Phase, prefix: str) -> tuple[DefectRecord, ...]:
        out = []
        for i, uid in enumerate(ids):
            for _ in range(int(counts[i])):
                out.append(DefectRecord(f"{prefix}{len(out) + 1:04d}", uid, phase))
        return tuple(out)

    return ProjectData(
        run_id=run_id or f"synthetic-{n_units}-seed{seed}",
        context=ContextProfile.from_mapping({"project": "synthetic", "domain": "generated", "phase": "code"}),
        units=units,
        inspection_defects=records(insp_counts, Phase.INSPECTION, "I"),
        historical_defects=records(hist_counts, Phase.HISTORICAL, "H"),
        test_defects=records(test_counts, Phase.TEST, "T"),
        test_effort=tuple(TestEffortRecord(uid, round(float(test_effort[i]), 1)) for i, uid in enumerate(ids)),
    )
