"""Turn raw bug-history records into a canonical event log and traces.

A history record is one tracker change (who/when/what/removed/added on a
bug). Each (what, removed, added) combination is labelled with a 3-letter
activity code kept in an ActivityCatalog; the event log is the per-case,
time-ordered sequence of those codes.

File formats (all UTF-8, LF):
  event-log CSV   header ``case_id,timestamp,activity``, ISO-8601 Z timestamps
  catalog CSV     header ``code,what,removed,added,description,count``
  history input   CSV with columns bug_id,who,when,what,removed,added, or a
                  JSON array of objects with those keys
"""

from __future__ import annotations

import csv
import json
import string
from dataclasses import dataclass, field
from datetime import datetime, timezone
from itertools import product
from typing import Iterable, Sequence, TextIO

TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%SZ"

HISTORY_FIELDS = ("bug_id", "who", "when", "what", "removed", "added")

EVENT_LOG_HEADER = ("case_id", "timestamp", "activity")

CATALOG_HEADER = ("code", "what", "removed", "added", "description", "count")

WILDCARD = "*"

_VOWELS = set("AEIOU")


class ParseError(ValueError):
    """Malformed input row, key or timestamp; message names the location."""


class CatalogCapacityError(RuntimeError):
    """All 17,576 three-letter codes are taken."""


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 timestamp into a UTC datetime at second precision.

    Accepts a trailing ``Z`` or a numeric offset; naive values are read as UTC.
    """
    text = value.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    try:
        parsed = datetime.fromisoformat(text)
    except ValueError:
        raise ParseError(f"invalid timestamp {value!r}") from None
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(ts: datetime) -> str:
    if ts.tzinfo is not None:
        ts = ts.astimezone(timezone.utc)
    return ts.strftime(TIMESTAMP_FORMAT)


def case_sort_key(case_id: str) -> tuple:
    """All-digit case ids order numerically, anything else lexically after."""
    if case_id.isdigit():
        return (0, int(case_id), case_id)
    return (1, 0, case_id)


@dataclass(frozen=True)
class HistoryRecord:
    """One raw tracker change: who changed what field, from what, to what."""

    bug_id: str
    who: str
    when: datetime
    what: str
    removed: str
    added: str

    def __post_init__(self) -> None:
        if not self.bug_id:
            raise ValueError("bug_id must be non-empty")
        if not (self.what or self.removed or self.added):
            raise ValueError("what/removed/added must not all be empty")


@dataclass(frozen=True)
class Event:
    """One event-log row; ordinal is the event's position in the sorted log."""

    case_id: str
    timestamp: datetime
    activity: str
    ordinal: int


@dataclass(frozen=True)
class Trace:
    """One case's activity-code sequence with parallel timestamps."""

    case_id: str
    activities: tuple[str, ...]
    timestamps: tuple[datetime, ...]

    def __post_init__(self) -> None:
        if not self.activities:
            raise ValueError(f"trace {self.case_id}: empty activity sequence")
        if len(self.activities) != len(self.timestamps):
            raise ValueError(f"trace {self.case_id}: list length mismatch")
        if any(a > b for a, b in zip(self.timestamps, self.timestamps[1:])):
            raise ValueError(f"trace {self.case_id}: timestamps decrease")

    def __len__(self) -> int:
        return len(self.activities)


@dataclass
class EventLog:
    """Events grouped by case (ascending) and time-ordered within a case."""

    events: list[Event] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.events)

    def case_ids(self) -> list[str]:
        seen: dict[str, None] = {}
        for ev in self.events:
            seen.setdefault(ev.case_id, None)
        return list(seen)

    def sublog(self, case_ids: Iterable[str]) -> "EventLog":
        wanted = set(case_ids)
        return EventLog([ev for ev in self.events if ev.case_id in wanted])


@dataclass
class CatalogEntry:
    code: str
    what: str
    removed: str
    added: str
    description: str
    count: int = 0

    def specificity(self) -> int:
        return (self.removed != WILDCARD) + (self.added != WILDCARD)


class ActivityCatalog:
    """Bidirectional map between change patterns and 3-letter activity codes.

    ``removed``/``added`` patterns may be the wildcard ``*``. Lookups prefer
    the most specific matching entry (exact fields beat wildcards), earliest
    entry on ties. Mutation is single-writer: serialize ``derive`` calls
    against one instance.
    """

    def __init__(self, entries: Iterable[CatalogEntry] = ()) -> None:
        self.entries: list[CatalogEntry] = []
        self._codes: set[str] = set()
        self._patterns: set[tuple[str, str, str]] = set()
        for entry in entries:
            self.add(entry)

    def add(self, entry: CatalogEntry) -> None:
        code = entry.code
        if len(code) != 3 or not all(c in string.ascii_uppercase for c in code):
            raise ValueError(f"bad activity code {code!r}")
        if code in self._codes:
            raise ValueError(f"duplicate activity code {code!r}")
        pattern = (entry.what, entry.removed, entry.added)
        if pattern in self._patterns:
            raise ValueError(f"duplicate pattern triple {pattern!r}")
        self.entries.append(entry)
        self._codes.add(code)
        self._patterns.add(pattern)

    def lookup(self, what: str, removed: str, added: str) -> CatalogEntry | None:
        best: CatalogEntry | None = None
        for entry in self.entries:
            if entry.what != what:
                continue
            if entry.removed not in (WILDCARD, removed):
                continue
            if entry.added not in (WILDCARD, added):
                continue
            if best is None or entry.specificity() > best.specificity():
                best = entry
        return best

    def derive(self, what: str, removed: str, added: str) -> str:
        entry = self.lookup(what, removed, added)
        if entry is None:
            code = self._free_code(_base_code(what))
            entry = CatalogEntry(code, what, removed, added, f"Change to {what}")
            self.add(entry)
        entry.count += 1
        return entry.code

    def _free_code(self, base: str) -> str:
        if base not in self._codes:
            return base
        for letter in string.ascii_uppercase:
            candidate = base[:2] + letter
            if candidate not in self._codes:
                return candidate
        for suffix in product(string.ascii_uppercase, repeat=2):
            candidate = base[0] + "".join(suffix)
            if candidate not in self._codes:
                return candidate
        for letters in product(string.ascii_uppercase, repeat=3):
            candidate = "".join(letters)
            if candidate not in self._codes:
                return candidate
        raise CatalogCapacityError("all 17,576 activity codes are in use")


def _base_code(what: str) -> str:
    """First letter of ``what`` plus its next two consonants (vowels as filler)."""
    letters = [c for c in what.upper() if c in string.ascii_uppercase]
    if not letters:
        return "XXX"
    head, rest = letters[0], letters[1:]
    consonants = [c for c in rest if c not in _VOWELS]
    vowels = [c for c in rest if c in _VOWELS]
    picked = [head] + (consonants + vowels)[:2]
    return "".join(picked + ["X"] * (3 - len(picked)))


def derive_activity_code(
    what: str, removed: str, added: str, catalog: ActivityCatalog
) -> str:
    """Code for the change triple; registers a fresh deterministic code when unseen."""
    return catalog.derive(what, removed, added)


def default_catalog() -> ActivityCatalog:
    """Seed catalog covering the common Bugzilla lifecycle fields."""
    rows = [
        ("ASS", "Assigned To", WILDCARD, WILDCARD, "Bug handed to a resolver"),
        ("CCC", "CC", WILDCARD, WILDCARD, "CC list membership changed"),
        ("QAC", "QA Contact", WILDCARD, WILDCARD, "QA contact set or changed"),
        ("SUM", "Summary", WILDCARD, WILDCARD, "Summary text edited"),
        ("TAR", "Target Milestone", WILDCARD, WILDCARD, "Target milestone set"),
        ("ISC", "Ever Confirmed", WILDCARD, WILDCARD, "Bug confirmed as real"),
        ("BLO", "Blocks", WILDCARD, WILDCARD, "Blocking bug list changed"),
        ("DEP", "Depends on", WILDCARD, WILDCARD, "Dependency list changed"),
        ("WHI", "Whiteboard", WILDCARD, WILDCARD, "Whiteboard notes edited"),
        ("VER", "Version", WILDCARD, WILDCARD, "Affected version changed"),
        ("OPS", "OS", WILDCARD, WILDCARD, "Operating system field changed"),
        ("SNR", "Status", "NEW", "RESOLVED", "Status moved New to Resolved"),
        ("SRR", "Status", "RESOLVED", "REOPENED", "Resolved bug reopened"),
        ("SRV", "Status", "RESOLVED", "VERIFIED", "Resolution verified by QA"),
        ("SUR", "Status", "UNCONFIRMED", "RESOLVED", "Unconfirmed bug resolved"),
        ("REF", "Resolution", WILDCARD, "FIXED", "Resolution set to Fixed"),
        ("RED", "Resolution", WILDCARD, "DUPLICATE", "Resolution set to Duplicate"),
        ("REX", "Resolution", WILDCARD, "WONTFIX", "Resolution set to Wontfix"),
        ("REN", "Resolution", WILDCARD, "INVALID", "Resolution set to Invalid"),
        ("REI", "Resolution", WILDCARD, "INCOMPLETE", "Resolution set to Incomplete"),
        ("REW", "Resolution", WILDCARD, "WORKSFORME", "Resolution set to Worksforme"),
    ]
    return ActivityCatalog(
        CatalogEntry(code, what, removed, added, desc) for code, what, removed, added, desc in rows
    )


def _record_from_mapping(row: dict, where: str) -> HistoryRecord:
    missing = [key for key in HISTORY_FIELDS if row.get(key) is None]
    if missing:
        raise ParseError(f"{where}: missing field(s) {', '.join(missing)}")
    try:
        when = parse_timestamp(str(row["when"]))
    except ParseError as exc:
        raise ParseError(f"{where}: {exc}") from None
    try:
        return HistoryRecord(
            bug_id=str(row["bug_id"]),
            who=str(row["who"]),
            when=when,
            what=str(row["what"]),
            removed=str(row["removed"]),
            added=str(row["added"]),
        )
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}") from None


def parse_history_csv(source: TextIO) -> list[HistoryRecord]:
    reader = csv.DictReader(source)
    if reader.fieldnames is None:
        return []
    header = set(reader.fieldnames)
    missing = [key for key in HISTORY_FIELDS if key not in header]
    if missing:
        raise ParseError(f"line 1: header missing column(s) {', '.join(missing)}")
    records = []
    for row in reader:
        if None in row.values() or row.get(None):
            raise ParseError(f"line {reader.line_num}: wrong number of fields")
        records.append(_record_from_mapping(row, f"line {reader.line_num}"))
    return records


def parse_history_json(source: TextIO) -> list[HistoryRecord]:
    try:
        data = json.load(source)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(data, list):
        raise ParseError("history JSON must be an array of objects")
    records = []
    for idx, row in enumerate(data):
        if not isinstance(row, dict):
            raise ParseError(f"entry {idx}: not an object")
        records.append(_record_from_mapping(row, f"entry {idx}"))
    return records


def parse_history_records(source: TextIO, format: str) -> list[HistoryRecord]:
    """Parse history records from a character stream in ``csv`` or ``json`` form."""
    if format == "csv":
        return parse_history_csv(source)
    if format == "json":
        return parse_history_json(source)
    raise ValueError(f"unknown history format {format!r}")


def build_event_log(
    records: Sequence[HistoryRecord], catalog: ActivityCatalog
) -> EventLog:
    """Group records by case and time, deriving activity codes via the catalog.

    Cases order per :func:`case_sort_key`; within a case, events sort by
    timestamp with the original record order breaking ties (stable). Ordinals
    are renumbered to the sorted positions so the log round-trips through CSV.
    """
    keyed = []
    for position, rec in enumerate(records):
        code = catalog.derive(rec.what, rec.removed, rec.added)
        keyed.append((case_sort_key(rec.bug_id), rec.when, position, rec.bug_id, code))
    keyed.sort(key=lambda item: (item[0], item[1], item[2]))
    return EventLog(
        [
            Event(case_id=bug_id, timestamp=when, activity=code, ordinal=i)
            for i, (_, when, _, bug_id, code) in enumerate(keyed)
        ]
    )


def to_sequential(log: EventLog) -> list[Trace]:
    """One trace per case, activities in event order."""
    traces: list[Trace] = []
    activities: list[str] = []
    timestamps: list[datetime] = []
    current: str | None = None
    for ev in log.events:
        if ev.case_id != current:
            if current is not None:
                traces.append(Trace(current, tuple(activities), tuple(timestamps)))
            current = ev.case_id
            activities, timestamps = [], []
        activities.append(ev.activity)
        timestamps.append(ev.timestamp)
    if current is not None:
        traces.append(Trace(current, tuple(activities), tuple(timestamps)))
    return traces


def write_event_log_csv(log: EventLog, sink: TextIO) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(EVENT_LOG_HEADER)
    for ev in log.events:
        writer.writerow((ev.case_id, format_timestamp(ev.timestamp), ev.activity))


def read_event_log_csv(source: TextIO) -> EventLog:
    """Parse an event-log CSV, normalizing to canonical case/time order.

    Canonical files (as written by :func:`write_event_log_csv`) read back
    identically; rows of foreign files are stably re-sorted.
    """
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("line 1: empty event-log file") from None
    if tuple(header) != EVENT_LOG_HEADER:
        raise ParseError(f"line 1: expected header {','.join(EVENT_LOG_HEADER)}")
    keyed = []
    for position, row in enumerate(reader):
        if len(row) != 3:
            raise ParseError(f"line {reader.line_num}: wrong number of fields")
        case_id, raw_ts, activity = row
        try:
            ts = parse_timestamp(raw_ts)
        except ParseError as exc:
            raise ParseError(f"line {reader.line_num}: {exc}") from None
        keyed.append((case_sort_key(case_id), ts, position, case_id, activity))
    keyed.sort(key=lambda item: (item[0], item[1], item[2]))
    return EventLog(
        [
            Event(case_id, ts, activity, ordinal=i)
            for i, (_, ts, _, case_id, activity) in enumerate(keyed)
        ]
    )


def write_catalog_csv(catalog: ActivityCatalog, sink: TextIO) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(CATALOG_HEADER)
    for entry in catalog.entries:
        writer.writerow(
            (entry.code, entry.what, entry.removed, entry.added, entry.description, entry.count)
        )


def read_catalog_csv(source: TextIO) -> ActivityCatalog:
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("line 1: empty catalog file") from None
    if tuple(header) != CATALOG_HEADER:
        raise ParseError(f"line 1: expected header {','.join(CATALOG_HEADER)}")
    catalog = ActivityCatalog()
    for row in reader:
        if len(row) != 6:
            raise ParseError(f"line {reader.line_num}: wrong number of fields")
        code, what, removed, added, description, count = row
        try:
            catalog.add(CatalogEntry(code, what, removed, added, description, int(count)))
        except ValueError as exc:
            raise ParseError(f"line {reader.line_num}: {exc}") from None
    return catalog
