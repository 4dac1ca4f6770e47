"""Synthetic event logs with controlled variation, for tests and scenarios."""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .log import Event, EventLog, Trace

PROFILES = ("identical", "all_distinct", "duplicated", "random")
EPOCH_START = 1577836800.0  # 2020-01-01T00:00:00Z


@dataclass(frozen=True)
class LogSpec:
    n_traces: int = 10
    trace_length: int | tuple[int, int] = 5
    alphabet_size: int = 5
    profile: str = "random"
    seed: int | None = None
    base: "LogSpec | None" = None
    timestamp_step: float = 60.0

    def __post_init__(self):
        if self.profile not in PROFILES:
            raise ValueError(f"unknown profile {self.profile!r}")
        if self.profile == "duplicated":
            if self.base is None:
                raise ValueError("duplicated profile needs a base spec")
            return
        lo, hi = self.length_range
        if self.n_traces < 1 or lo < 1 or hi < lo or self.alphabet_size < 1:
            raise ValueError("counts must be positive and the length range non-empty")
        if self.timestamp_step <= 0:
            raise ValueError("timestamp_step must be positive")
        if self.profile == "random" and self.seed is None:
            raise ValueError("random profile requires a seed")

    @property
    def length_range(self) -> tuple[int, int]:
        if isinstance(self.trace_length, int):
            return self.trace_length, self.trace_length
        lo, hi = self.trace_length
        return int(lo), int(hi)

    @classmethod
    def duplicated(cls, base: "LogSpec") -> "LogSpec":
        return cls(n_traces=2 * base.n_traces, profile="duplicated", base=base,
                   alphabet_size=base.alphabet_size, timestamp_step=base.timestamp_step,
                   trace_length=base.trace_length, seed=base.seed)


def _label(i: int) -> str:
    return f"A{i}"


def _sequences(spec: LogSpec) -> list[tuple[str, ...]]:
    lo, hi = spec.length_range
    k = spec.alphabet_size
    if spec.profile == "identical":
        seq = tuple(_label(i % k) for i in range(lo))
        return [seq] * spec.n_traces
    if spec.profile == "all_distinct":
        n, l = spec.n_traces, lo
        if n * l <= k:
            # disjoint symbol blocks
            return [tuple(_label(t * l + i) for i in range(l)) for t in range(n)]
        if l > k:
            raise ValueError(f"alphabet of {k} is too small for {n} distinct traces of length {l}")
        perms = list(itertools.islice(itertools.permutations(range(k), l), n))
        if len(perms) < n:
            raise ValueError(f"alphabet of {k} is too small for {n} distinct traces of length {l}")
        return [tuple(_label(i) for i in p) for p in perms]
    if spec.profile == "random":
        rng = np.random.Generator(np.random.Philox(spec.seed))
        lengths = rng.integers(lo, hi + 1, size=spec.n_traces)
        return [tuple(_label(int(a)) for a in rng.integers(0, k, size=int(m))) for m in lengths]
    base = _sequences(spec.base)
    return base + base


def _source_name(spec: LogSpec) -> str:
    if spec.profile == "duplicated":
        return f"duplicated({_source_name(spec.base)})"
    name = f"{spec.profile}-n{spec.n_traces}-l{spec.length_range[0]}"
    if spec.length_range[0] != spec.length_range[1]:
        name += f"..{spec.length_range[1]}"
    name += f"-k{spec.alphabet_size}"
    if spec.profile == "random":
        name += f"-seed{spec.seed}"
    return name


def generate(spec: LogSpec, start: float = EPOCH_START) -> EventLog:
    """Build the log described by ``spec``.

    Cases are ``c1, c2, ...`` and laid out back to back in time with
    ``timestamp_step`` seconds between consecutive events, so timestamp
    order and trace order coincide.
    """
    step = spec.timestamp_step
    traces = []
    t = start
    for i, seq in enumerate(_sequences(spec), 1):
        cid = f"c{i}"
        events = []
        for a in seq:
            events.append(Event(a, t, cid))
            t += step
        traces.append(Trace(cid, tuple(events)))
    return EventLog(tuple(traces), _source_name(spec))


def _iso(ts: float) -> str:
    text = datetime.fromtimestamp(ts, tz=timezone.utc).isoformat()
    return text.replace("+00:00", "Z")


def to_csv(log: EventLog) -> str:
    """CSV in the default ``parse_csv`` schema (case, activity, timestamp)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["case", "activity", "timestamp"])
    for tr in log.traces:
        for e in tr.events:
            w.writerow([e.case_id, e.activity, _iso(e.timestamp)])
    return buf.getvalue()
