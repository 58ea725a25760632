"""Fault-tolerant sequential execution of edit-call sequences.

Calls run in order against the evolving deck; each one is validated
right before it is applied, so earlier calls can create or delete the
targets of later ones. A failed call is recorded and skipped — a bad
step never aborts the sequence, and the report always has exactly one
entry per call.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .canonical import deck_digest
from .model import DeckDocument
from .ops import ApiCall, AppliedEffect, ApplyError, apply_call, validate_call

STATUS_OK = "ok"
STATUS_VALIDATION_FAILED = "validation-failed"
STATUS_RUNTIME_FAILED = "runtime-failed"


@dataclass
class ExecutionEntry:
    call_id: int
    op: str
    status: str
    effect: Optional[AppliedEffect] = None
    error_code: Optional[str] = None
    error_message: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "call_id": self.call_id,
            "op": self.op,
            "status": self.status,
            "effect": self.effect.to_dict() if self.effect else None,
            "error_code": self.error_code,
            "error_message": self.error_message,
        }


@dataclass
class ExecutionReport:
    entries: list[ExecutionEntry] = field(default_factory=list)
    before_digest: str = ""
    after_digest: str = ""

    @property
    def total(self) -> int:
        return len(self.entries)

    @property
    def succeeded(self) -> int:
        return sum(1 for e in self.entries if e.status == STATUS_OK)

    @property
    def failed(self) -> int:
        return self.total - self.succeeded

    def ok_calls(self) -> list[int]:
        return [e.call_id for e in self.entries if e.status == STATUS_OK]

    def to_dict(self) -> dict:
        return {
            "entries": [e.to_dict() for e in self.entries],
            "aggregate": {
                "total": self.total,
                "succeeded": self.succeeded,
                "failed": self.failed,
            },
            "before_digest": self.before_digest,
            "after_digest": self.after_digest,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExecutionReport":
        report = cls(
            before_digest=data.get("before_digest", ""),
            after_digest=data.get("after_digest", ""),
        )
        for e in data.get("entries", []):
            effect = None
            if e.get("effect"):
                eff = e["effect"]
                effect = AppliedEffect(
                    created=list(eff.get("created", [])),
                    deleted=list(eff.get("deleted", [])),
                    modified={k: list(v) for k, v in eff.get("modified", {}).items()},
                    declared=list(eff.get("declared", [])),
                )
            report.entries.append(ExecutionEntry(
                call_id=e["call_id"],
                op=e.get("op", ""),
                status=e["status"],
                effect=effect,
                error_code=e.get("error_code"),
                error_message=e.get("error_message"),
            ))
        return report


def execute_sequence(doc: DeckDocument,
                     seq: list[ApiCall]) -> tuple[DeckDocument, ExecutionReport]:
    """Run every call, isolating failures; never raises for bad calls."""
    report = ExecutionReport(before_digest=deck_digest(doc))
    current = doc
    for i, call in enumerate(seq):
        call_id = call.call_id if call.call_id is not None else i
        result = validate_call(current, call)
        if not result.ok:
            report.entries.append(ExecutionEntry(
                call_id=call_id, op=call.op, status=STATUS_VALIDATION_FAILED,
                error_code=result.failure.code, error_message=result.failure.message))
            continue
        try:
            current, effect = apply_call(current, call)
        except ApplyError as exc:
            report.entries.append(ExecutionEntry(
                call_id=call_id, op=call.op, status=STATUS_RUNTIME_FAILED,
                error_code=exc.code, error_message=str(exc)))
            continue
        except Exception as exc:  # pragma: no cover - defensive no-abort guarantee
            report.entries.append(ExecutionEntry(
                call_id=call_id, op=call.op, status=STATUS_RUNTIME_FAILED,
                error_code="internal", error_message=repr(exc)))
            continue
        report.entries.append(ExecutionEntry(
            call_id=call_id, op=call.op, status=STATUS_OK, effect=effect))
    report.after_digest = deck_digest(current)
    return current, report


def replay_ok_calls(doc: DeckDocument, seq: list[ApiCall],
                    report: ExecutionReport) -> DeckDocument:
    """Re-run only the calls the report marked ok; used to audit digests."""
    ok_ids = set(report.ok_calls())
    current = doc
    for i, call in enumerate(seq):
        call_id = call.call_id if call.call_id is not None else i
        if call_id in ok_ids:
            current, _ = apply_call(current, call)
    return current


class UnknownSnapshotError(KeyError):
    pass


class DeckHistory:
    """Append-only snapshot store backing undo and session replay."""

    def __init__(self) -> None:
        self._snapshots: list[tuple[DeckDocument, str]] = []

    def __len__(self) -> int:
        return len(self._snapshots)

    def snapshot(self, doc: DeckDocument) -> int:
        self._snapshots.append((doc.copy(), deck_digest(doc)))
        return len(self._snapshots) - 1

    def digest(self, index: int) -> str:
        self._check(index)
        return self._snapshots[index][1]

    def digests(self) -> list[str]:
        return [d for _, d in self._snapshots]

    def restore(self, index: int) -> DeckDocument:
        self._check(index)
        deck = self._snapshots[index][0].copy()
        assert deck_digest(deck) == self._snapshots[index][1]
        return deck

    def _check(self, index: int) -> None:
        if not isinstance(index, int) or index < 0 or index >= len(self._snapshots):
            raise UnknownSnapshotError(
                f"unknown snapshot index {index!r} (have {len(self._snapshots)})")
