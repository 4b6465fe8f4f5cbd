"""Publication records: parsing, validation and serialization.

Records are stored one JSON object per line::

    {"paper_id": "p1", "year": 1995,
     "authorships": [{"author_key": "a1", "raw_affiliations": ["TIFR, Mumbai"]}],
     "cited_ids": ["p0"]}

Unknown keys are ignored so the format can grow without breaking readers.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from pathlib import Path

from .errors import DuplicatePaperId, EmptyCorpus, MalformedLine, SchemaViolation


@dataclass(frozen=True)
class AuthorAffiliation:
    author_key: str
    raw_affiliations: tuple[str, ...]


@dataclass(frozen=True)
class PublicationRecord:
    paper_id: str
    year: int
    authorships: tuple[AuthorAffiliation, ...]
    cited_ids: tuple[str, ...] = ()

    def raw_affiliations(self) -> Iterator[str]:
        for authorship in self.authorships:
            yield from authorship.raw_affiliations

    def to_dict(self) -> dict:
        return {
            "paper_id": self.paper_id,
            "year": self.year,
            "authorships": [
                {"author_key": a.author_key, "raw_affiliations": list(a.raw_affiliations)}
                for a in self.authorships
            ],
            "cited_ids": list(self.cited_ids),
        }


@dataclass(frozen=True)
class CorpusSummary:
    papers: int
    distinct_raw_affiliations: int
    year_range: tuple[int, int]
    external_citation_count: int
    internal_citation_count: int


def _require_str(value, line_no: int, field: str) -> str:
    if not isinstance(value, str) or not value.strip():
        raise SchemaViolation(line_no, field, "expected non-empty string")
    return value


def _parse_authorships(value, line_no: int) -> tuple[AuthorAffiliation, ...]:
    if not isinstance(value, list) or not value:
        raise SchemaViolation(line_no, "authorships", "expected non-empty list")
    merged: dict[str, list[str]] = {}
    for idx, item in enumerate(value):
        where = f"authorships[{idx}]"
        if not isinstance(item, dict):
            raise SchemaViolation(line_no, where, "expected object")
        if "author_key" not in item:
            raise SchemaViolation(line_no, f"{where}.author_key", "missing")
        key = _require_str(item["author_key"], line_no, f"{where}.author_key")
        raws = item.get("raw_affiliations")
        if not isinstance(raws, list) or not raws:
            raise SchemaViolation(line_no, f"{where}.raw_affiliations", "expected non-empty list")
        affs = merged.setdefault(key, [])
        for raw in raws:
            raw = _require_str(raw, line_no, f"{where}.raw_affiliations").strip()
            # the same author listed twice collapses into one authorship
            if raw not in affs:
                affs.append(raw)
    return tuple(AuthorAffiliation(k, tuple(v)) for k, v in merged.items())


def parse_record(obj, line_no: int = 1) -> PublicationRecord:
    """Build a record from a decoded JSON object, validating every field."""
    if not isinstance(obj, dict):
        raise SchemaViolation(line_no, "<record>", "expected JSON object")
    for field in ("paper_id", "year", "authorships", "cited_ids"):
        if field not in obj:
            raise SchemaViolation(line_no, field, "missing")

    paper_id = _require_str(obj["paper_id"], line_no, "paper_id")
    year = obj["year"]
    if isinstance(year, bool) or not isinstance(year, int) or year <= 0:
        raise SchemaViolation(line_no, "year", "expected positive integer")
    authorships = _parse_authorships(obj["authorships"], line_no)

    cited = obj["cited_ids"]
    if not isinstance(cited, list):
        raise SchemaViolation(line_no, "cited_ids", "expected list")
    seen: dict[str, None] = {}
    for cid in cited:
        seen[_require_str(cid, line_no, "cited_ids")] = None
    return PublicationRecord(paper_id, year, authorships, tuple(seen))


def iter_records(lines: Iterable[str]) -> Iterator[PublicationRecord]:
    """Stream records from JSONL text, checking paper_id uniqueness as it goes."""
    ids: set[str] = set()
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedLine(line_no, exc.msg) from None
        record = parse_record(obj, line_no)
        if record.paper_id in ids:
            raise DuplicatePaperId(record.paper_id)
        ids.add(record.paper_id)
        yield record


def parse_records(stream: Iterable[str] | str) -> list[PublicationRecord]:
    if isinstance(stream, str):
        # not splitlines(): U+2028 and friends may appear inside JSON strings
        stream = stream.split("\n")
    return list(iter_records(stream))


def load_records(path: str | Path) -> list[PublicationRecord]:
    with open(path, encoding="utf-8") as fh:
        return parse_records(fh)


def dump_records(records: Iterable[PublicationRecord]) -> str:
    return "".join(
        json.dumps(r.to_dict(), ensure_ascii=False, separators=(",", ":")) + "\n"
        for r in records
    )


def validate_corpus(records: list[PublicationRecord]) -> CorpusSummary:
    if not records:
        raise EmptyCorpus()
    ids = {r.paper_id for r in records}
    raws = {raw for r in records for raw in r.raw_affiliations()}
    external = internal = 0
    for r in records:
        for cid in r.cited_ids:
            if cid in ids:
                internal += 1
            else:
                external += 1
    years = [r.year for r in records]
    return CorpusSummary(
        papers=len(records),
        distinct_raw_affiliations=len(raws),
        year_range=(min(years), max(years)),
        external_citation_count=external,
        internal_citation_count=internal,
    )
