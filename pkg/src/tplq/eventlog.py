"""Event logs: parsing (XES, CSV), canonical endpoints and variant multisets.

A raw log holds one :class:`Trace` per case with real activities only.
:func:`canonicalize` prefixes every trace with the artificial start label
and closes the traces of finished cases with the artificial end label.
"""
from __future__ import annotations

import csv
import gzip
import io
import re
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Optional
from xml.sax.saxutils import quoteattr

from .errors import CanonicalizationError, LogParseError, SchemaError

START = "\u25b6"  # ▶
END = "\u25a0"  # ■
RESERVED = frozenset({START, END})

DEFAULT_COLUMNS = {"case": "case", "activity": "activity", "timestamp": "timestamp"}

_EPOCH_MS = re.compile(r"^-?\d+$")
_FRACTION = re.compile(r"(\d{2}:\d{2}:\d{2})\.(\d+)")
_TZ_NO_COLON = re.compile(r"([+-]\d{2})(\d{2})$")


def parse_timestamp(value: str) -> datetime:
    """Parse ISO-8601 or epoch milliseconds into an aware UTC datetime (ms resolution)."""
    text = value.strip()
    if not text:
        raise ValueError("empty timestamp")
    if _EPOCH_MS.match(text):
        ms = int(text)
        dt = datetime.fromtimestamp(ms / 1000.0, tz=timezone.utc)
        return dt.replace(microsecond=(ms % 1000) * 1000)
    if text[-1] in "zZ":
        text = text[:-1] + "+00:00"
    text = _FRACTION.sub(lambda m: f"{m.group(1)}.{(m.group(2) + '000000')[:6]}", text)
    text = _TZ_NO_COLON.sub(r"\1:\2", text)
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    dt = dt.astimezone(timezone.utc)
    return dt.replace(microsecond=dt.microsecond // 1000 * 1000)


def format_timestamp(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat(timespec="milliseconds").replace("+00:00", "Z")


@dataclass(frozen=True)
class Event:
    case_id: str
    activity: str
    timestamp: datetime


@dataclass(frozen=True)
class Trace:
    """Activities of one case, with aligned timestamps.

    Artificial labels carry ``None`` as timestamp.
    """

    case_id: str
    activities: tuple
    timestamps: tuple
    complete: bool = False

    def __post_init__(self):
        if len(self.activities) != len(self.timestamps):
            raise ValueError("activities and timestamps must be aligned")

    def __len__(self):
        return len(self.activities)

    @property
    def real_activities(self) -> tuple:
        return tuple(a for a in self.activities if a not in RESERVED)

    @property
    def n_events(self) -> int:
        return sum(1 for a in self.activities if a not in RESERVED)

    def events(self) -> list:
        return [
            Event(self.case_id, a, t)
            for a, t in zip(self.activities, self.timestamps)
            if a not in RESERVED
        ]


@dataclass(frozen=True)
class EventLog:
    traces: Mapping[str, Trace] = field(default_factory=dict)
    release_index: int = 0
    canonical: bool = False

    def __len__(self):
        return len(self.traces)

    def __iter__(self):
        for cid in self.case_ids():
            yield self.traces[cid]

    def case_ids(self) -> list:
        return sorted(self.traces)

    @property
    def activity_alphabet(self) -> frozenset:
        acts = {a for t in self.traces.values() for a in t.activities}
        return frozenset(acts) | RESERVED

    @property
    def n_events(self) -> int:
        return sum(t.n_events for t in self.traces.values())

    def complete_cases(self) -> set:
        return {cid for cid, t in self.traces.items() if t.complete}

    def partial_cases(self) -> set:
        return {cid for cid, t in self.traces.items() if not t.complete}

    def with_release_index(self, index: int) -> "EventLog":
        return replace(self, release_index=index)

    @classmethod
    def from_events(cls, events: Iterable[Event]) -> "EventLog":
        """Group events per case; within a case sort by timestamp, stable on ties."""
        per_case: dict = {}
        for ev in events:
            if not ev.activity:
                raise SchemaError(f"case {ev.case_id!r}: empty activity label")
            if ev.activity in RESERVED:
                raise SchemaError(f"case {ev.case_id!r}: reserved activity label {ev.activity!r}")
            per_case.setdefault(ev.case_id, []).append(ev)
        traces = {}
        for cid, evs in per_case.items():
            evs.sort(key=lambda e: e.timestamp)
            traces[cid] = Trace(
                cid, tuple(e.activity for e in evs), tuple(e.timestamp for e in evs)
            )
        return cls(traces)

    @classmethod
    def from_sequences(cls, sequences: Mapping[str, Iterable[str]], start=None) -> "EventLog":
        """Build a raw log from activity sequences, with synthetic one-minute spaced timestamps."""
        base = start or datetime(2020, 1, 1, tzinfo=timezone.utc)
        events = []
        for n, (cid, acts) in enumerate(sequences.items()):
            for k, a in enumerate(acts):
                ts = base.timestamp() + 60 * (k + n)
                events.append(Event(str(cid), a, datetime.fromtimestamp(ts, tz=timezone.utc)))
        log = cls.from_events(events)
        # keep empty sequences as empty traces
        traces = dict(log.traces)
        for cid, acts in sequences.items():
            traces.setdefault(str(cid), Trace(str(cid), (), ()))
        return cls(traces)


@dataclass
class VariantMultiset:
    """Trace variants with frequencies; ``raw`` keeps unrounded noisy counts when perturbed."""

    entries: dict
    raw: Optional[dict] = None

    def __getitem__(self, variant):
        return self.entries.get(tuple(variant), 0)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def total(self) -> int:
        return sum(self.entries.values())

    def most_common(self, n=None):
        return Counter(self.entries).most_common(n)


def variant_multiset(log: EventLog) -> VariantMultiset:
    if not log.canonical:
        raise CanonicalizationError("variant multiset expects a canonicalized log")
    return VariantMultiset(dict(Counter(t.activities for t in log.traces.values())))


def canonicalize(log: EventLog, complete_cases: Iterable[str] = ()) -> EventLog:
    """Add the artificial start label to every trace and the end label to finished cases."""
    if log.canonical:
        raise CanonicalizationError("log is already canonicalized")
    complete = set(complete_cases)
    unknown = complete - set(log.traces)
    if unknown:
        raise CanonicalizationError(f"unknown case ids in complete_cases: {sorted(unknown)[:5]}")
    traces = {}
    for cid, t in log.traces.items():
        if any(a in RESERVED for a in t.activities):
            raise CanonicalizationError(f"case {cid!r} already carries artificial labels")
        acts = (START,) + t.activities
        ts = (None,) + t.timestamps
        if cid in complete:
            acts += (END,)
            ts += (None,)
        traces[cid] = Trace(cid, acts, ts, complete=cid in complete)
    return EventLog(traces, release_index=log.release_index, canonical=True)


def cases_ending_with(log: EventLog, end_activities: Iterable[str]) -> set:
    """Case ids whose last real activity is one of ``end_activities``."""
    ends = set(end_activities)
    return {cid for cid, t in log.traces.items() if t.real_activities[-1:] and t.real_activities[-1] in ends}


# -- XES ---------------------------------------------------------------------

def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _attr(elem, kind: str, key: str):
    for child in elem:
        if _local(child.tag) == kind and child.get("key") == key:
            return child.get("value")
    return None


def parse_xes(stream) -> EventLog:
    """Read the minimal XES subset: concept:name strings and time:timestamp dates."""
    try:
        root = ET.parse(stream).getroot()
    except ET.ParseError as exc:
        line, col = exc.position
        raise LogParseError(f"malformed XES: {exc.msg if hasattr(exc, 'msg') else exc}", line, col) from None
    if _local(root.tag) != "log":
        raise SchemaError(f"root element is <{_local(root.tag)}>, expected <log>")
    events = []
    empty_cases = []
    seen = set()
    for n, trace in enumerate(e for e in root if _local(e.tag) == "trace"):
        cid = _attr(trace, "string", "concept:name") or f"trace_{n}"
        if cid in seen:
            raise SchemaError(f"duplicate case id {cid!r}")
        seen.add(cid)
        count = 0
        for ev in trace:
            if _local(ev.tag) != "event":
                continue
            act = _attr(ev, "string", "concept:name")
            ts = _attr(ev, "date", "time:timestamp")
            if act is None or ts is None:
                missing = "concept:name" if act is None else "time:timestamp"
                raise SchemaError(f"trace {cid!r}: event {count} lacks {missing}")
            try:
                when = parse_timestamp(ts)
            except ValueError:
                raise SchemaError(f"trace {cid!r}: bad timestamp {ts!r}") from None
            events.append(Event(cid, act, when))
            count += 1
        if count == 0:
            empty_cases.append(cid)
    log = EventLog.from_events(events)
    if empty_cases:
        traces = dict(log.traces)
        traces.update((cid, Trace(cid, (), ())) for cid in empty_cases)
        log = EventLog(traces)
    return log


def write_xes(log: EventLog, stream) -> None:
    """Write real events of ``log`` as XES text to a text stream."""
    stream.write('<?xml version="1.0" encoding="UTF-8"?>\n')
    stream.write('<log xes.version="1.0" xmlns="http://www.xes-standard.org/">\n')
    for t in log:
        stream.write(f'  <trace>\n    <string key="concept:name" value={quoteattr(t.case_id)}/>\n')
        for ev in t.events():
            stream.write(
                "    <event>"
                f'<string key="concept:name" value={quoteattr(ev.activity)}/>'
                f'<date key="time:timestamp" value="{format_timestamp(ev.timestamp)}"/>'
                "</event>\n"
            )
        stream.write("  </trace>\n")
    stream.write("</log>\n")


# -- CSV ---------------------------------------------------------------------

def _text(stream):
    if isinstance(stream, io.TextIOBase):
        return stream
    return io.TextIOWrapper(stream, encoding="utf-8-sig", newline="")


def parse_csv(stream, columns: Optional[Mapping[str, str]] = None) -> EventLog:
    cols = dict(DEFAULT_COLUMNS)
    cols.update(columns or {})
    reader = csv.DictReader(_text(stream))
    try:
        header = reader.fieldnames
    except csv.Error as exc:
        raise LogParseError(f"malformed CSV header: {exc}", 1) from None
    if header is None:
        raise SchemaError("CSV has no header row")
    missing = [name for name in cols.values() if name not in header]
    if missing:
        raise SchemaError(f"CSV lacks mapped columns: {missing}")
    events = []
    try:
        for row in reader:
            line = reader.line_num
            act = row[cols["activity"]]
            if act is None:
                raise LogParseError("row has too few fields", line)
            try:
                ts = parse_timestamp(row[cols["timestamp"]] or "")
            except ValueError:
                raise SchemaError(f"row {line}: unparseable timestamp {row[cols['timestamp']]!r}") from None
            if not act:
                raise SchemaError(f"row {line}: empty activity")
            events.append(Event(row[cols["case"]], act, ts))
    except csv.Error as exc:
        raise LogParseError(f"malformed CSV: {exc}", reader.line_num) from None
    return EventLog.from_events(events)


def write_csv(log: EventLog, stream) -> None:
    """Native interchange format: case,activity,timestamp (real events only)."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["case", "activity", "timestamp"])
    for t in log:
        for ev in t.events():
            writer.writerow([ev.case_id, ev.activity, format_timestamp(ev.timestamp)])


def read_log(path, fmt: Optional[str] = None, columns=None) -> EventLog:
    """Open a (possibly gzipped) XES or CSV file; format inferred from the suffix."""
    path = Path(path)
    suffixes = [s.lower() for s in path.suffixes]
    if fmt is None:
        fmt = "xes" if ".xes" in suffixes else "csv"
    opener = gzip.open if suffixes[-1:] == [".gz"] else open
    with opener(path, "rb") as fh:
        if fmt == "xes":
            return parse_xes(fh)
        if fmt == "csv":
            return parse_csv(fh, columns)
    raise ValueError(f"unknown log format {fmt!r}")
