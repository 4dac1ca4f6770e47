"""Event-log data model and XES/CSV ingestion.

Timestamps are held as float seconds since the Unix epoch (UTC); naive
timestamps are read as UTC. Within a case, events are stably sorted by
timestamp, so equal timestamps keep their file order.
"""

from __future__ import annotations

import csv
import gzip
import io
import os
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import BinaryIO, Iterable, Sequence


class LogParseError(ValueError):
    """Raised when an event log cannot be read.

    ``location`` carries the trace/event indices (XES) or row number (CSV)
    of the offending record when one is known.
    """

    def __init__(self, message, location=None):
        self.location = location
        if location:
            message = f"{message} ({location})"
        super().__init__(message)


class EmptyLogError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class Event:
    activity: str
    timestamp: float
    case_id: str

    def __post_init__(self):
        if not self.activity:
            raise ValueError("activity label must be non-empty")


@dataclass(frozen=True, slots=True)
class Trace:
    case_id: str
    events: tuple[Event, ...]

    def __post_init__(self):
        if not self.events:
            raise ValueError(f"trace {self.case_id!r} has no events")
        prev = None
        for e in self.events:
            if e.case_id != self.case_id:
                raise ValueError(f"event of case {e.case_id!r} inside trace {self.case_id!r}")
            if prev is not None and e.timestamp < prev:
                raise ValueError(f"trace {self.case_id!r} is not ordered by timestamp")
            prev = e.timestamp

    def __len__(self):
        return len(self.events)

    @property
    def activities(self) -> tuple[str, ...]:
        return tuple(e.activity for e in self.events)


@dataclass(frozen=True, slots=True)
class Variant:
    activity_sequence: tuple[str, ...]
    frequency: int


@dataclass(frozen=True)
class EventLog:
    traces: tuple[Trace, ...]
    source_name: str = ""

    def __post_init__(self):
        ids = [t.case_id for t in self.traces]
        if len(set(ids)) != len(ids):
            raise ValueError("case ids must be unique across traces")

    def __len__(self):
        return len(self.traces)

    @property
    def n_events(self) -> int:
        return sum(len(t) for t in self.traces)

    @classmethod
    def from_sequences(cls, sequences: Iterable[Sequence[str]], source_name="", step=1.0, start=0.0):
        """Build a log from bare activity sequences.

        Cases are named ``"1", "2", ...``; trace ``i`` starts after trace
        ``i-1`` ends, so timestamp order equals the given trace order.
        """
        traces = []
        t = start
        for i, seq in enumerate(sequences, 1):
            cid = str(i)
            events = []
            for a in seq:
                events.append(Event(a, t, cid))
                t += step
            traces.append(Trace(cid, tuple(events)))
        return cls(tuple(traces), source_name)


_FRACTION = re.compile(r"(\.\d+)")
_COMPACT_OFFSET = re.compile(r"([+-]\d{2})(\d{2})$")


def parse_timestamp(text: str) -> float:
    """Parse an ISO-8601 instant into epoch seconds.

    Accepts ``T`` or space separators, fractional seconds of any length,
    ``Z`` and ``+hh:mm``/``+hhmm`` offsets.
    """
    s = text.strip()
    if not s:
        raise ValueError("empty timestamp")
    if s[-1] in "zZ":
        s = s[:-1] + "+00:00"
    m = _FRACTION.search(s)
    if m:
        frac = m.group(1)
        digits = frac[1:7].ljust(6, "0")
        s = s[: m.start()] + "." + digits + s[m.end():]
    tz = _COMPACT_OFFSET.search(s)
    if tz and len(s) > 10:
        s = s[: tz.start()] + tz.group(1) + ":" + tz.group(2)
    dt = datetime.fromisoformat(s)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def _parse_with_format(text: str, fmt: str) -> float:
    dt = datetime.strptime(text.strip(), fmt)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def _sorted_trace(case_id, events):
    # list.sort is stable: equal timestamps keep file order
    events = sorted(events, key=lambda e: e.timestamp)
    return Trace(case_id, tuple(events))


def _read_bytes(source) -> bytes:
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    elif isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            data = fh.read()
    else:
        data = source.read()
        if isinstance(data, str):
            data = data.encode("utf-8")
    if data[:2] == b"\x1f\x8b":
        data = gzip.decompress(data)
    return data


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_xes(source: BinaryIO | bytes, source_name: str = "") -> EventLog:
    """Read an XES document (optionally gzip-compressed) into an EventLog.

    Only ``concept:name`` and ``time:timestamp`` are read; attributes nested
    inside container attributes are ignored. A trace without a
    ``concept:name`` gets its 1-based ordinal as case id.
    """
    data = _read_bytes(source)
    traces = []
    depth_in_trace = None
    depth = 0
    trace_idx = -1
    event_idx = -1
    trace_name = None
    raw_events = []
    ev_name = ev_ts = None
    in_event = False
    try:
        for kind, elem in ET.iterparse(io.BytesIO(data), events=("start", "end")):
            tag = _local(elem.tag)
            if kind == "start":
                depth += 1
                if tag == "trace" and depth_in_trace is None:
                    depth_in_trace = depth
                    trace_idx += 1
                    event_idx = -1
                    trace_name = None
                    raw_events = []
                elif tag == "event" and depth_in_trace is not None and depth == depth_in_trace + 1:
                    in_event = True
                    event_idx += 1
                    ev_name = ev_ts = None
                continue
            # end of element
            if depth_in_trace is not None:
                key = elem.get("key")
                if in_event and depth == depth_in_trace + 2:
                    if tag == "string" and key == "concept:name":
                        ev_name = elem.get("value")
                    elif tag == "date" and key == "time:timestamp":
                        ev_ts = elem.get("value")
                elif not in_event and depth == depth_in_trace + 1 and key == "concept:name" and tag != "event":
                    trace_name = elem.get("value")
                if tag == "event" and in_event and depth == depth_in_trace + 1:
                    in_event = False
                    loc = f"trace {trace_idx}, event {event_idx}"
                    if ev_name is None or not ev_name.strip():
                        raise LogParseError("event lacks concept:name", loc)
                    if ev_ts is None:
                        raise LogParseError("event lacks time:timestamp", loc)
                    try:
                        ts = parse_timestamp(ev_ts)
                    except ValueError as exc:
                        raise LogParseError(f"unparseable timestamp {ev_ts!r}: {exc}", loc) from None
                    raw_events.append((ev_name.strip(), ts))
                    elem.clear()
                elif tag == "trace" and depth == depth_in_trace:
                    cid = trace_name if trace_name is not None else str(trace_idx + 1)
                    if raw_events:
                        events = [Event(a, t, cid) for a, t in raw_events]
                        traces.append(_sorted_trace(cid, events))
                    depth_in_trace = None
                    elem.clear()
            depth -= 1
    except ET.ParseError as exc:
        raise LogParseError(f"malformed XML: {exc}") from None
    try:
        return EventLog(tuple(traces), source_name)
    except ValueError as exc:
        raise LogParseError(str(exc)) from None


@dataclass(frozen=True)
class ColumnMapping:
    case: str = "case"
    activity: str = "activity"
    timestamp: str = "timestamp"
    timestamp_format: str | None = None
    delimiter: str = ","


def parse_csv(source: BinaryIO | bytes, mapping: ColumnMapping | None = None, source_name: str = "") -> EventLog:
    """Read a headed CSV file into an EventLog.

    Rows are grouped by the case column. Traces are ordered by the
    timestamp of their first event, ties by first appearance in the file.
    """
    mapping = mapping or ColumnMapping()
    data = _read_bytes(source)
    text = data.decode("utf-8-sig")
    if not text.strip():
        raise LogParseError("empty file")
    reader = csv.reader(io.StringIO(text, newline=""), delimiter=mapping.delimiter)
    header = next(reader, None)
    if not header:
        raise LogParseError("empty file")
    header = [h.strip() for h in header]
    cols = {}
    for role in ("case", "activity", "timestamp"):
        name = getattr(mapping, role)
        if name not in header:
            raise LogParseError(f"column not found: {name!r}")
        cols[role] = header.index(name)
    ci, ai, ti = cols["case"], cols["activity"], cols["timestamp"]
    width = max(ci, ai, ti)
    fmt = mapping.timestamp_format
    cases: dict[str, list[Event]] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) <= width:
            raise LogParseError("row has too few columns", f"row {lineno}")
        cid = row[ci].strip()
        act = row[ai].strip()
        raw_ts = row[ti]
        try:
            ts = _parse_with_format(raw_ts, fmt) if fmt else parse_timestamp(raw_ts)
        except ValueError as exc:
            raise LogParseError(f"unparseable timestamp {raw_ts!r}: {exc}", f"row {lineno}") from None
        if not act:
            raise LogParseError("empty activity label", f"row {lineno}")
        cases.setdefault(cid, []).append(Event(act, ts, cid))
    if not cases:
        raise LogParseError("empty file")
    traces = [_sorted_trace(cid, evs) for cid, evs in cases.items()]
    order = sorted(range(len(traces)), key=lambda i: traces[i].events[0].timestamp)
    return EventLog(tuple(traces[i] for i in order), source_name)


def detect_format(path) -> str:
    name = os.fspath(path).lower()
    if name.endswith((".xes", ".xes.gz")):
        return "xes"
    if name.endswith((".csv", ".csv.gz")):
        return "csv"
    raise LogParseError(f"cannot infer log format from file name {os.fspath(path)!r}")


def read_log(path, fmt: str = "auto", mapping: ColumnMapping | None = None) -> EventLog:
    """Parse a log file, choosing the parser by ``fmt`` or the file extension."""
    if fmt == "auto":
        fmt = detect_format(path)
    name = os.path.basename(os.fspath(path))
    for suffix in (".gz", ".xes", ".csv"):
        if name.lower().endswith(suffix):
            name = name[: -len(suffix)]
    with open(path, "rb") as fh:
        if fmt == "xes":
            return parse_xes(fh, source_name=name)
        if fmt == "csv":
            return parse_csv(fh, mapping, source_name=name)
    raise ValueError(f"unknown log format {fmt!r}")


def to_plain_log(log: EventLog) -> list[Event]:
    """Merge all traces into one timestamp-ordered event sequence.

    Ties are broken by trace position in the log, then by position within
    the trace, so each case keeps its own order.
    """
    if not log.traces:
        raise EmptyLogError("cannot build a plain log from an empty event log")
    keyed = [
        (e.timestamp, ti, ei, e)
        for ti, t in enumerate(log.traces)
        for ei, e in enumerate(t.events)
    ]
    keyed.sort(key=lambda k: (k[0], k[1], k[2]))
    return [k[3] for k in keyed]


def trace_order_log(log: EventLog) -> list[Event]:
    """Concatenate whole traces in log order (no interleaving)."""
    return [e for t in log.traces for e in t.events]


def variants(log: EventLog) -> list[Variant]:
    """Distinct activity sequences with frequencies, in first-occurrence order."""
    counts: dict[tuple[str, ...], int] = {}
    for t in log.traces:
        key = t.activities
        counts[key] = counts.get(key, 0) + 1
    return [Variant(seq, n) for seq, n in counts.items()]
