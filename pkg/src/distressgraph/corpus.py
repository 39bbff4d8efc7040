"""Corpus ingestion and span extraction.

A corpus is a JSON-lines file of annotated utterances from counseling
transcripts, helplines, forums and similar sources.  Each record carries the
raw text, its language, provenance, and annotated character spans; every
valid span becomes an expression node.  A small phrase-mining helper finds
candidate spans for un-annotated text.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence, TextIO, Union

from .annotation import AnnotationRecord
from .embedding import is_word_char
from .errors import IngestIOError, ParseError, ValidationError
from .graph import ExpressionNode, Provenance

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Span:
    """Annotated character range; offsets count Unicode scalar values."""

    start: int
    end: int
    annotation: AnnotationRecord

    def to_dict(self) -> dict:
        return {
            "start": self.start,
            "end": self.end,
            "annotation": self.annotation.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Span":
        try:
            return cls(
                start=int(data["start"]),
                end=int(data["end"]),
                annotation=AnnotationRecord.from_dict(data["annotation"]),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ValidationError(f"bad span: {exc}") from exc


@dataclass(frozen=True)
class CorpusRecord:
    raw_text: str
    spans: tuple[Span, ...]
    language: str
    provenance: Provenance

    def to_dict(self) -> dict:
        return {
            "raw_text": self.raw_text,
            "spans": [s.to_dict() for s in self.spans],
            "language": self.language,
            "provenance": self.provenance.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CorpusRecord":
        try:
            return cls(
                raw_text=str(data["raw_text"]),
                spans=tuple(Span.from_dict(s) for s in data.get("spans", [])),
                language=str(data["language"]).strip().lower(),
                provenance=Provenance.from_dict(data["provenance"]),
            )
        except ValidationError:
            raise
        except (KeyError, ValueError, TypeError) as exc:
            raise ValidationError(f"bad corpus record: {exc}") from exc


def validate_record(data: dict) -> list[str]:
    """All schema violations of a raw corpus record, not just the first."""
    if not isinstance(data, dict):
        return ["record is not a JSON object"]
    problems = []
    for key in ("raw_text", "language", "provenance"):
        if key not in data:
            problems.append(f"missing field {key!r}")
    text = str(data.get("raw_text", ""))
    if "raw_text" in data and not text.strip():
        problems.append("raw_text is empty")
    if "language" in data and not str(data["language"]).strip():
        problems.append("language is empty")
    prov = data.get("provenance")
    if isinstance(prov, dict):
        try:
            Provenance.from_dict(prov)
        except ValidationError as exc:
            problems.append(str(exc))
    elif prov is not None:
        problems.append("provenance is not an object")

    spans = data.get("spans", [])
    if not isinstance(spans, list):
        return problems + ["spans is not an array"]
    seen: set[tuple[int, int, str]] = set()
    for i, raw_span in enumerate(spans):
        where = f"span {i}"
        if not isinstance(raw_span, dict):
            problems.append(f"{where}: not an object")
            continue
        try:
            span = Span.from_dict(raw_span)
        except ValidationError as exc:
            problems.append(f"{where}: {exc}")
            continue
        if not 0 <= span.start < span.end <= len(text):
            problems.append(
                f"{where}: bounds ({span.start}, {span.end}) outside text "
                f"of length {len(text)}"
            )
        for issue in span.annotation.problems():
            problems.append(f"{where}: {issue}")
        key = (span.start, span.end, span.annotation.annotator_id)
        if key in seen:
            problems.append(
                f"{where}: duplicate of another span at ({span.start}, "
                f"{span.end}) by annotator {span.annotation.annotator_id!r}"
            )
        seen.add(key)
    return problems


def read_corpus(
    source: Union[TextIO, Iterable[str]]
) -> Iterator[tuple[int, CorpusRecord]]:
    """Strict JSON-lines parse, yielding (line number, record).

    Blank lines are skipped; the first malformed line raises ParseError.
    Ingestion uses the lenient per-record path instead.
    """
    for lineno, line in enumerate(source, start=1):
        line = line.strip()
        if not line:
            continue
        where = f"line {lineno}"
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}", location=where) from exc
        problems = validate_record(data)
        if problems:
            raise ParseError("; ".join(problems), location=where)
        yield lineno, CorpusRecord.from_dict(data)


def extract_expressions(
    raw_text: str, lexicon: Sequence[str]
) -> list[tuple[int, int]]:
    """Left-to-right greedy longest-match spans of lexicon phrases.

    Matches are literal, must sit on word boundaries, and never overlap:
    once a phrase matches, scanning resumes after it.
    """
    phrases = sorted({p for p in lexicon}, key=lambda p: (-len(p), p))
    for phrase in phrases:
        if not phrase:
            raise ValidationError("empty phrase in lexicon")
    spans = []
    i = 0
    n = len(raw_text)
    while i < n:
        if i > 0 and is_word_char(raw_text[i - 1]) and is_word_char(raw_text[i]):
            i += 1
            continue
        hit = None
        for phrase in phrases:
            j = i + len(phrase)
            if raw_text.startswith(phrase, i):
                if j >= n or not (is_word_char(raw_text[j - 1]) and is_word_char(raw_text[j])):
                    hit = (i, j)
                    break
        if hit is not None:
            spans.append(hit)
            i = hit[1]
        else:
            i += 1
    return spans


@dataclass
class IngestReport:
    """Outcome of one ingestion pass."""

    accepted: int = 0
    rejected: int = 0
    created_node_ids: list[str] = field(default_factory=list)
    existing_nodes: int = 0
    records_processed: int = 0
    errors: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "rejected": self.rejected,
            "created_node_ids": list(self.created_node_ids),
            "existing_nodes": self.existing_nodes,
            "records_processed": self.records_processed,
            "errors": list(self.errors),
        }


AddExpression = Callable[..., tuple[ExpressionNode, bool]]


def ingest_corpus(
    source: Union[TextIO, Iterable[str]],
    add_expression: AddExpression,
) -> IngestReport:
    """Feed corpus lines through a node-creating callback.

    Invalid records are counted, reported, and skipped; they never create
    nodes.  Re-ingesting the same data is a no-op thanks to node dedup.
    A failing underlying stream raises IngestIOError carrying how many
    records were processed before the failure.
    """
    report = IngestReport()
    lines = iter(source)
    while True:
        try:
            line = next(lines)
        except StopIteration:
            break
        except OSError as exc:
            raise IngestIOError(
                f"corpus stream failed: {exc}",
                records_processed=report.records_processed,
            ) from exc
        line = line.strip()
        if not line:
            continue
        report.records_processed += 1
        lineno = report.records_processed
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            report.rejected += 1
            report.errors.append(f"record {lineno}: invalid JSON: {exc}")
            continue
        problems = validate_record(data)
        if problems:
            report.rejected += 1
            report.errors.append(f"record {lineno}: " + "; ".join(problems))
            continue
        record = CorpusRecord.from_dict(data)
        for span in record.spans:
            node, created = add_expression(
                surface_text=record.raw_text[span.start:span.end],
                language=record.language,
                annotation=span.annotation,
                provenance=record.provenance,
            )
            if created:
                report.created_node_ids.append(node.id)
            else:
                report.existing_nodes += 1
        report.accepted += 1
    logger.info(
        "ingest: %d accepted, %d rejected, %d nodes created",
        report.accepted,
        report.rejected,
        len(report.created_node_ids),
    )
    return report


__all__ = [
    "CorpusRecord",
    "IngestReport",
    "Span",
    "extract_expressions",
    "ingest_corpus",
    "read_corpus",
    "validate_record",
]
