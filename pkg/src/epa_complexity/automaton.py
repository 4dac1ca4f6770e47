"""Extended prefix automaton: a prefix tree over the cases of a log whose
states carry a partition id and the number of events mapped to them.

Partitions are assigned while the tree grows, one event at a time:

* a state created under a predecessor that already has outgoing
  transitions opens a new partition ``max + 1``;
* the very first state (under an empty root) gets partition 1;
* any other new state inherits its predecessor's partition.

The number of partitions therefore equals the number of distinct variants.
The partition layout depends on the order events arrive in, which is why
``build_epa_from_log`` takes an explicit ``order``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .log import Event, EventLog, to_plain_log, trace_order_log

ROOT = 0


@dataclass(frozen=True)
class PartitionStats:
    state_counts: tuple[int, ...]
    event_counts: tuple[int, ...]

    @property
    def n_states(self) -> int:
        return sum(self.state_counts)

    @property
    def n_events(self) -> int:
        return sum(self.event_counts)


@dataclass(frozen=True, eq=False)
class ExtendedPrefixAutomaton:
    """Frozen automaton in array form.

    Index ``s`` of each array describes state ``s``; state 0 is the root
    (parent -1, activity -1, partition 0, count 0). ``activities[k]`` is
    the label of activity id ``k``.
    """

    parent: np.ndarray
    activity: np.ndarray
    partition: np.ndarray
    event_count: np.ndarray
    activities: tuple[str, ...]

    @property
    def n_states(self) -> int:
        """Number of states excluding the root."""
        return len(self.parent) - 1

    @property
    def n_partitions(self) -> int:
        return int(self.partition.max()) if self.n_states else 0

    @property
    def n_events(self) -> int:
        return int(self.event_count.sum())

    @property
    def alphabet(self) -> frozenset[str]:
        return frozenset(self.activities[a] for a in self.activity[1:].tolist())

    def transitions(self) -> dict[tuple[int, str], int]:
        """``(source state, label) -> target state`` for every edge."""
        return {
            (int(p), self.activities[a]): s
            for s, (p, a) in enumerate(zip(self.parent.tolist(), self.activity.tolist()))
            if s != ROOT
        }

    def label_of(self, state: int) -> str | None:
        return None if state == ROOT else self.activities[int(self.activity[state])]

    def partition_of(self, state: int) -> int | None:
        return None if state == ROOT else int(self.partition[state])

    def prefix(self, state: int) -> tuple[str, ...]:
        out = []
        while state != ROOT:
            out.append(self.activities[int(self.activity[state])])
            state = int(self.parent[state])
        return tuple(reversed(out))

    def same_structure(self, other: "ExtendedPrefixAutomaton") -> bool:
        """True if both automata have identical states, labels, partitions and counts."""
        if self.n_states != other.n_states:
            return False
        lab = [self.label_of(s) for s in range(len(self.parent))]
        olab = [other.label_of(s) for s in range(len(other.parent))]
        return (
            lab == olab
            and np.array_equal(self.parent, other.parent)
            and np.array_equal(self.partition, other.partition)
            and np.array_equal(self.event_count, other.event_count)
        )


class EpaBuilder:
    """Online construction: feed events one at a time, freeze at any point.

    Only the case id and activity of each event are used; callers must feed
    each case's events in order.
    """

    def __init__(self):
        self._parent = [-1]
        self._activity = [-1]
        self._partition = [0]
        self._count = [0]
        self._n_out = [0]
        self._children: dict[tuple[int, int], int] = {}
        self._last: dict = {}
        self._act_ids: dict[str, int] = {}
        self._max_c = 0

    def add(self, case_id, activity: str) -> int:
        """Add one event and return the state it was mapped to."""
        act = self._act_ids.setdefault(activity, len(self._act_ids))
        pred = self._last.get(case_id, ROOT)
        cur = self._children.get((pred, act))
        if cur is None:
            if self._n_out[pred] > 0:
                self._max_c += 1
                c = self._max_c
            elif pred == ROOT:
                self._max_c = 1
                c = 1
            else:
                c = self._partition[pred]
            cur = len(self._parent)
            self._parent.append(pred)
            self._activity.append(act)
            self._partition.append(c)
            self._count.append(0)
            self._n_out.append(0)
            self._n_out[pred] += 1
            self._children[(pred, act)] = cur
        self._count[cur] += 1
        self._last[case_id] = cur
        return cur

    def extend(self, events: Iterable[Event]) -> "EpaBuilder":
        for e in events:
            self.add(e.case_id, e.activity)
        return self

    def freeze(self) -> ExtendedPrefixAutomaton:
        return ExtendedPrefixAutomaton(
            parent=np.asarray(self._parent, dtype=np.int64),
            activity=np.asarray(self._activity, dtype=np.int64),
            partition=np.asarray(self._partition, dtype=np.int64),
            event_count=np.asarray(self._count, dtype=np.int64),
            activities=tuple(self._act_ids),
        )


def encode_events(plain: Sequence[Event]):
    """Dense integer codes for cases and activities, in first-appearance order."""
    case_ids: dict = {}
    act_ids: dict[str, int] = {}
    cases = np.empty(len(plain), dtype=np.int64)
    acts = np.empty(len(plain), dtype=np.int64)
    for i, e in enumerate(plain):
        cases[i] = case_ids.setdefault(e.case_id, len(case_ids))
        acts[i] = act_ids.setdefault(e.activity, len(act_ids))
    return cases, acts, tuple(act_ids)


def build_epa(plain: Sequence[Event]) -> ExtendedPrefixAutomaton:
    """Build the automaton from a within-case order-preserving event sequence."""
    cases, acts, labels = encode_events(plain)
    parent, activity, partition, count = _kernels.build_epa(cases, acts, max(len(labels), 1))
    return ExtendedPrefixAutomaton(parent, activity, partition, count, labels)


def events_in_order(log: EventLog, order: str = "timestamp") -> list[Event]:
    """The event stream fed to the automaton: ``timestamp`` interleaves cases
    by time, ``trace`` replays whole traces in log order."""
    if order == "timestamp":
        return to_plain_log(log)
    if order == "trace":
        return trace_order_log(log)
    raise ValueError(f"unknown order {order!r}; expected 'timestamp' or 'trace'")


def build_epa_from_log(log: EventLog, order: str = "timestamp") -> ExtendedPrefixAutomaton:
    return build_epa(events_in_order(log, order))


def partition_stats(epa: ExtendedPrefixAutomaton) -> PartitionStats:
    """State and event totals per partition id 1..max."""
    if epa.n_states == 0:
        return PartitionStats((), ())
    part = epa.partition[1:]
    k = epa.n_partitions
    states = np.bincount(part, minlength=k + 1)[1:]
    events = np.zeros(k + 1, dtype=np.int64)
    np.add.at(events, part, epa.event_count[1:])
    return PartitionStats(
        tuple(int(x) for x in states),
        tuple(int(x) for x in events[1:]),
    )


_PALETTE = (
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
    "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f",
)


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def export_dot(epa: ExtendedPrefixAutomaton) -> str:
    """Graphviz rendering: one node per state, filled by partition."""
    lines = [
        "digraph EPA {",
        "  rankdir=LR;",
        '  node [shape=circle, style=filled, fontname="Helvetica"];',
        '  s0 [label="root", shape=doublecircle, fillcolor="#ffffff"];',
    ]
    for s in range(1, len(epa.parent)):
        label = _dot_escape(epa.label_of(s))
        c = int(epa.partition[s])
        n = int(epa.event_count[s])
        color = _PALETTE[(c - 1) % len(_PALETTE)]
        lines.append(f'  s{s} [label="{label}\\n|seq|={n}", fillcolor="{color}", group="p{c}", tooltip="partition {c}"];')
    for s in range(1, len(epa.parent)):
        label = _dot_escape(epa.label_of(s))
        lines.append(f'  s{int(epa.parent[s])} -> s{s} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(epa: ExtendedPrefixAutomaton) -> str:
    """Debug dump: an array of ``{id, activity, partition, event_count, parent_id}``."""
    states = [
        {
            "id": s,
            "activity": epa.label_of(s),
            "partition": epa.partition_of(s),
            "event_count": int(epa.event_count[s]),
            "parent_id": None if s == ROOT else int(epa.parent[s]),
        }
        for s in range(len(epa.parent))
    ]
    return json.dumps({"states": states}, indent=2)
