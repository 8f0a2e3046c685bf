"""Per-context record of whether an assumption's rule paid off in past QA runs.

An assumption's validity in a context is the number of earlier runs in that
exact context (same canonical factor set) where it met the success
criterion. Failures are kept for audit but never counted.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from typing import Optional

from ..model import ContextProfile
from .dsl import SelectionRule


class DuplicateOutcome(ValueError):
    pass


@dataclass(frozen=True)
class Assumption:
    id: str
    description: str
    rule: SelectionRule


@dataclass(frozen=True)
class LedgerEntry:
    context_key: str
    assumption_id: str
    run_id: str
    success: bool
    timestamp: str


@dataclass(frozen=True)
class ValidityLedger:
    entries: tuple[LedgerEntry, ...] = ()

    def __len__(self):
        return len(self.entries)

    def to_json(self) -> str:
        return json.dumps([asdict(e) for e in self.entries], indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ValidityLedger":
        data = json.loads(text) if text.strip() else []
        if not isinstance(data, list):
            raise ValueError("ledger must be a JSON array")
        entries = []
        for i, e in enumerate(data):
            try:
                entries.append(
                    LedgerEntry(
                        context_key=str(e["context_key"]),
                        assumption_id=str(e["assumption_id"]),
                        run_id=str(e["run_id"]),
                        success=bool(e["success"]),
                        timestamp=str(e["timestamp"]),
                    )
                )
            except (KeyError, TypeError) as exc:
                raise ValueError(f"ledger entry {i} malformed: {exc}") from exc
        ledger = cls()
        for e in entries:
            ledger = _append(ledger, e)
        return ledger


def context_key(ctx: ContextProfile) -> str:
    return ctx.key


def _utc_now() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat().replace("+00:00", "Z")


def _append(ledger: ValidityLedger, entry: LedgerEntry) -> ValidityLedger:
    triple = (entry.context_key, entry.assumption_id, entry.run_id)
    for e in ledger.entries:
        if (e.context_key, e.assumption_id, e.run_id) == triple:
            raise DuplicateOutcome(
                f"outcome for assumption {entry.assumption_id!r} in run {entry.run_id!r} "
                f"already recorded for context {entry.context_key!r}"
            )
    return ValidityLedger(ledger.entries + (entry,))


def record_outcome(
    ledger: ValidityLedger,
    ctx: ContextProfile,
    assumption_id: str,
    run_id: str,
    success: bool,
    timestamp: Optional[str] = None,
) -> ValidityLedger:
    """Return a new ledger with the outcome appended."""
    entry = LedgerEntry(context_key(ctx), assumption_id, run_id, bool(success), timestamp or _utc_now())
    return _append(ledger, entry)


def get_validity(ledger: ValidityLedger, ctx: ContextProfile, assumption_id: str) -> int:
    key = context_key(ctx)
    return sum(1 for e in ledger.entries if e.context_key == key and e.assumption_id == assumption_id and e.success)
