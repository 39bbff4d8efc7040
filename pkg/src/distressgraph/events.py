"""Append-only event log backing persistence and audit.

Every mutation of the system is recorded as one event; replaying the full
log into a fresh engine reconstructs the exact state, including generated
ids.  Events carry facts (full payloads), so a reader never needs the code
that produced them to interpret the log.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Optional, TextIO, Union

from .errors import ParseError, ValidationError


class EventKind(str, Enum):
    NODE_ADDED = "node_added"
    EDGE_ADDED = "edge_added"
    EDGE_ENQUEUED = "edge_enqueued"
    DECISION_SUBMITTED = "decision_submitted"
    ADJUDICATION_RESOLVED = "adjudication_resolved"
    THRESHOLD_UPDATED = "threshold_updated"
    BUNDLE_GENERATED = "bundle_generated"


@dataclass(frozen=True)
class EventRecord:
    sequence: int
    kind: EventKind
    payload: dict
    at: str

    def to_dict(self) -> dict:
        return {
            "sequence": self.sequence,
            "kind": self.kind.value,
            "payload": self.payload,
            "at": self.at,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EventRecord":
        try:
            payload = data["payload"]
            if not isinstance(payload, dict):
                raise ValidationError("payload is not an object")
            return cls(
                sequence=int(data["sequence"]),
                kind=EventKind(data["kind"]),
                payload=payload,
                at=str(data.get("at", "")),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ValidationError(f"bad event record: {exc}") from exc


class EventLog:
    """In-memory event sequence, optionally mirrored to a JSON-lines file.

    Sequences are gapless from 1.  When a path is attached, every append is
    written through and flushed before the call returns.
    """

    def __init__(self, path: Optional[Union[str, Path]] = None):
        self.records: list[EventRecord] = []
        self._path = Path(path) if path is not None else None
        self._fh: Optional[TextIO] = None
        if self._path is not None:
            self._fh = open(self._path, "a", encoding="utf-8")

    @property
    def next_sequence(self) -> int:
        return len(self.records) + 1

    def append(self, kind: EventKind, payload: dict, at: str = "") -> EventRecord:
        record = EventRecord(
            sequence=self.next_sequence, kind=EventKind(kind), payload=payload, at=at
        )
        self.records.append(record)
        if self._fh is not None:
            self._fh.write(json.dumps(record.to_dict(), ensure_ascii=False) + "\n")
            self._fh.flush()
        return record

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[EventRecord]:
        return iter(self.records)

    def dump_lines(self) -> str:
        return "".join(
            json.dumps(r.to_dict(), ensure_ascii=False) + "\n" for r in self.records
        )


def read_event_log(source: Union[TextIO, Iterable[str]]) -> list[EventRecord]:
    """Parse and sequence-check a JSON-lines event stream."""
    records = []
    expected = 1
    for lineno, line in enumerate(source, start=1):
        line = line.strip()
        if not line:
            continue
        where = f"event line {lineno}"
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}", location=where) from exc
        try:
            record = EventRecord.from_dict(data)
        except ValidationError as exc:
            raise ParseError(str(exc), location=where) from exc
        if record.sequence != expected:
            raise ParseError(
                f"sequence {record.sequence}, expected {expected}", location=where
            )
        records.append(record)
        expected += 1
    return records


def load_event_log(path: Union[str, Path]) -> list[EventRecord]:
    path = Path(path)
    if not path.exists():
        return []
    with open(path, encoding="utf-8") as fh:
        return read_event_log(fh)


__all__ = [
    "EventKind",
    "EventLog",
    "EventRecord",
    "load_event_log",
    "read_event_log",
]
