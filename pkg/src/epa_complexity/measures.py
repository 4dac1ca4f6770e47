"""Prior-work log complexity measures (size, variation, distance) and the
``measure_all`` driver that also folds in the entropy measures."""

from __future__ import annotations

import math
import multiprocessing as mp
import statistics
import time
import traceback
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import _kernels
from .automaton import build_epa_from_log, partition_stats
from .entropy import entropy_report
from .log import EmptyLogError, Event, EventLog, to_plain_log, variants

SOURCE = "▷"  # artificial start node
SINK = "□"  # artificial end node

ENTROPY_LABELS = ("var-e", "seq-e", "nvar-e", "nseq-e")
BASELINE_LABELS = (
    "magnitude", "variety", "support", "TL-min", "TL-avg", "TL-max", "granularity",
    "LOD", "t-comp", "LZ", "DT(#)", "DT(%)", "structure",
    "affinity", "dev-random", "avg-dist",
)
ALL_LABELS = ENTROPY_LABELS + BASELINE_LABELS

DEFAULT_BUDGET = 12 * 3600.0


def _require(log: EventLog):
    if not log.traces:
        raise EmptyLogError("measure undefined on an empty log")


# --- size -------------------------------------------------------------------

def size_measures(log: EventLog) -> dict[str, float]:
    _require(log)
    lengths = [len(t) for t in log.traces]
    gaps = [
        b.timestamp - a.timestamp
        for t in log.traces
        for a, b in zip(t.events, t.events[1:])
    ]
    return {
        "magnitude": sum(lengths),
        "variety": len({e.activity for t in log.traces for e in t.events}),
        "support": len(lengths),
        "TL-min": min(lengths),
        "TL-avg": sum(lengths) / len(lengths),
        "TL-max": max(lengths),
        "granularity": math.fsum(gaps) / len(gaps) if gaps else 0.0,
        "granularity-min": min(gaps) if gaps else 0.0,
    }


# --- variation --------------------------------------------------------------

def distinct_traces(log: EventLog) -> dict[str, float]:
    _require(log)
    n = len(variants(log))
    return {"DT(#)": n, "DT(%)": 100.0 * n / len(log.traces)}


def structure(log: EventLog) -> float:
    """Mean over traces of distinct activities divided by trace length."""
    _require(log)
    return math.fsum(len(set(t.activities)) / len(t) for t in log.traces) / len(log.traces)


@dataclass(frozen=True)
class DirectlyFollowsGraph:
    nodes: frozenset[str]
    edge_counts: dict[tuple[str, str], int] = field(hash=False)

    @property
    def activities(self) -> frozenset[str]:
        return self.nodes - {SOURCE, SINK}

    def inner_edges(self) -> dict[tuple[str, str], int]:
        return {
            (a, b): n for (a, b), n in self.edge_counts.items()
            if a != SOURCE and b != SINK
        }


def dfg(log: EventLog) -> DirectlyFollowsGraph:
    """Directly-follows counts with artificial source and sink per trace."""
    _require(log)
    counts: Counter = Counter()
    for t in log.traces:
        acts = t.activities
        counts[(SOURCE, acts[0])] += 1
        for a, b in zip(acts, acts[1:]):
            counts[(a, b)] += 1
        counts[(acts[-1], SINK)] += 1
    nodes = {SOURCE, SINK}
    for a, b in counts:
        nodes.add(a)
        nodes.add(b)
    return DirectlyFollowsGraph(frozenset(nodes), dict(counts))


def count_condensed_paths(nodes: Sequence, edges: Iterable[tuple], source, sink) -> int:
    """Number of distinct source-to-sink paths after collapsing every strongly
    connected component to one node. Exact (arbitrary-precision) count."""
    index = {n: i for i, n in enumerate(nodes)}
    pairs = [(index[a], index[b]) for a, b in edges]
    n = len(nodes)
    if pairs:
        rows, cols = zip(*pairs)
    else:
        rows, cols = (), ()
    adj = csr_matrix((np.ones(len(pairs)), (rows, cols)), shape=(n, n))
    n_comp, comp = connected_components(adj, directed=True, connection="strong")
    succ: list[set[int]] = [set() for _ in range(n_comp)]
    indeg = [0] * n_comp
    for a, b in pairs:
        ca, cb = comp[a], comp[b]
        if ca != cb and cb not in succ[ca]:
            succ[ca].add(cb)
            indeg[cb] += 1
    # Kahn order over the condensation, then forward DP
    order = [c for c in range(n_comp) if indeg[c] == 0]
    for c in order:
        for d in succ[c]:
            indeg[d] -= 1
            if indeg[d] == 0:
                order.append(d)
    ways = [0] * n_comp
    ways[comp[index[source]]] = 1
    for c in order:
        if ways[c]:
            for d in succ[c]:
                ways[d] += ways[c]
    return ways[comp[index[sink]]]


def lod(graph: DirectlyFollowsGraph, base: float = 10.0) -> float:
    """log10 of the number of acyclic source-to-sink paths (cycles condensed)."""
    if SOURCE not in graph.nodes or SINK not in graph.nodes:
        raise ValueError("graph lacks source/sink nodes")
    nodes = sorted(graph.nodes)
    count = count_condensed_paths(nodes, graph.edge_counts, SOURCE, SINK)
    if count == 0:
        raise ValueError("no path from source to sink")
    if count == 1:
        return 0.0
    return math.log10(count) if base == 10.0 else math.log(count, base)


def t_comp(graph: DirectlyFollowsGraph) -> int:
    return len(graph.inner_edges())


def _activity_codes(plain: Sequence[Event]) -> np.ndarray:
    ids: dict[str, int] = {}
    return np.fromiter((ids.setdefault(e.activity, len(ids)) for e in plain), dtype=np.int64, count=len(plain))


def lz_complexity(plain: Sequence[Event], delimited: bool = False) -> int:
    """LZ76 phrase count of the activity stream.

    With ``delimited`` the events are regrouped by case (in order of first
    appearance) and a fresh delimiter symbol separates consecutive traces.
    """
    if not plain:
        raise EmptyLogError("LZ complexity undefined on an empty sequence")
    if not delimited:
        return int(_kernels.lz76(_activity_codes(plain)))
    by_case: dict = {}
    for e in plain:
        by_case.setdefault(e.case_id, []).append(e.activity)
    ids: dict[str, int] = {}
    codes = []
    sep = -1
    for i, acts in enumerate(by_case.values()):
        if i:
            codes.append(sep)
        codes.extend(ids.setdefault(a, len(ids)) for a in acts)
    return int(_kernels.lz76(np.asarray(codes, dtype=np.int64)))


# --- distance ---------------------------------------------------------------

def _df_pairs(seq: Sequence[str]) -> set[tuple[str, str]]:
    return set(zip(seq, seq[1:]))


def affinity(log: EventLog) -> float:
    """Mean Jaccard overlap of directly-follows pair sets over all trace pairs."""
    if len(log.traces) < 2:
        raise ValueError("affinity needs at least two traces")
    vs = variants(log)
    pair_ids: dict[tuple[str, str], int] = {}
    flat: list[int] = []
    offsets = [0]
    for v in vs:
        ids = sorted({pair_ids.setdefault(p, len(pair_ids)) for p in _df_pairs(v.activity_sequence)})
        flat.extend(ids)
        offsets.append(len(flat))
    freq = np.asarray([v.frequency for v in vs], dtype=np.int64)
    cross = _kernels.pairwise_jaccard_sum(
        np.asarray(flat, dtype=np.int64), np.asarray(offsets, dtype=np.int64), freq
    )
    # identical-variant pairs overlap fully
    same = sum(f * (f - 1) // 2 for f in freq.tolist())
    n = len(log.traces)
    return (cross + same) / (n * (n - 1) // 2)


def dev_random(graph: DirectlyFollowsGraph, variety: int) -> float:
    """Mean normalized L1 distance of transition rows from the uniform row.

    1 means every activity has a single successor, 0 means successors are
    spread uniformly over all activities. With a single activity the only
    possible row is the uniform one and the result is 0.
    """
    inner = graph.inner_edges()
    if not inner:
        raise ValueError("no directly-follows edges between activities")
    if variety < 1:
        raise ValueError("variety must be positive")
    if variety == 1:
        return 0.0
    rows: dict[str, dict[str, int]] = {}
    for (a, b), n in inner.items():
        rows.setdefault(a, {})[b] = n
    uniform = 1.0 / variety
    worst = 2.0 * (1.0 - uniform)
    dists = []
    for a in sorted(rows):
        row = rows[a]
        total = sum(row.values())
        seen = math.fsum(abs(n / total - uniform) for n in row.values())
        dists.append((seen + (variety - len(row)) * uniform) / worst)
    return math.fsum(dists) / len(dists)


def avg_edit_distance(log: EventLog, weighting: str = "traces") -> float:
    """Mean Levenshtein distance over unordered pairs of traces or of variants."""
    if weighting not in ("traces", "variants"):
        raise ValueError(f"unknown weighting {weighting!r}")
    vs = variants(log)
    ids: dict[str, int] = {}
    flat: list[int] = []
    offsets = [0]
    for v in vs:
        flat.extend(ids.setdefault(a, len(ids)) for a in v.activity_sequence)
        offsets.append(len(flat))
    if weighting == "traces":
        n = len(log.traces)
        if n < 2:
            raise ValueError("average edit distance needs at least two traces")
        weights = np.asarray([v.frequency for v in vs], dtype=np.int64)
    else:
        n = len(vs)
        if n < 2:
            raise ValueError("average edit distance needs at least two variants")
        weights = np.ones(n, dtype=np.int64)
    total = _kernels.pairwise_levenshtein_sum(
        np.asarray(flat, dtype=np.int32), np.asarray(offsets, dtype=np.int64), weights
    )
    return int(total) / (n * (n - 1) // 2)


# --- driver -------------------------------------------------------------------

@dataclass
class MeasureVector:
    """Measure label -> value, plus per-cell failure flags and timings."""

    values: dict[str, float] = field(default_factory=dict)
    flags: dict[str, str] = field(default_factory=dict)
    seconds: dict[str, float] = field(default_factory=dict)
    messages: dict[str, str] = field(default_factory=dict)

    def __getitem__(self, label):
        return self.values[label]

    def __contains__(self, label):
        return label in self.values

    def labels(self) -> list[str]:
        return list(self.seconds)

    def populated(self) -> dict[str, float]:
        return {k: v for k, v in self.values.items() if k not in self.flags}


@dataclass(frozen=True)
class MeasureOptions:
    order: str = "timestamp"
    weighting: str = "traces"
    lz_delimited: bool = False


class _Context:
    """Lazily computed intermediates shared between measures of one log."""

    def __init__(self, log: EventLog, options: MeasureOptions):
        self.log = log
        self.options = options
        self._cache: dict = {}

    def get(self, name: str, fn: Callable):
        if name not in self._cache:
            self._cache[name] = fn()
        return self._cache[name]

    def entropy(self):
        return self.get("entropy", lambda: entropy_report(
            partition_stats(build_epa_from_log(self.log, self.options.order))
        ).as_dict())

    def sizes(self):
        return self.get("sizes", lambda: size_measures(self.log))

    def dt(self):
        return self.get("dt", lambda: distinct_traces(self.log))

    def graph(self):
        return self.get("dfg", lambda: dfg(self.log))


def _measure_fn(label: str) -> Callable[[_Context], float]:
    if label in ENTROPY_LABELS:
        return lambda ctx: ctx.entropy()[label]
    if label in ("magnitude", "variety", "support", "TL-min", "TL-avg", "TL-max", "granularity"):
        return lambda ctx: ctx.sizes()[label]
    if label in ("DT(#)", "DT(%)"):
        return lambda ctx: ctx.dt()[label]
    table = {
        "LOD": lambda ctx: lod(ctx.graph()),
        "t-comp": lambda ctx: t_comp(ctx.graph()),
        "LZ": lambda ctx: lz_complexity(to_plain_log(ctx.log), ctx.options.lz_delimited),
        "structure": lambda ctx: structure(ctx.log),
        "affinity": lambda ctx: affinity(ctx.log),
        "dev-random": lambda ctx: dev_random(ctx.graph(), ctx.sizes()["variety"]),
        "avg-dist": lambda ctx: avg_edit_distance(ctx.log, ctx.options.weighting),
    }
    try:
        return table[label]
    except KeyError:
        raise ValueError(f"unknown measure {label!r}") from None


def _child(conn, fn, ctx):
    try:
        conn.send(("ok", fn(ctx)))
    except BaseException as exc:  # reported back as a flagged cell
        conn.send(("error", f"{type(exc).__name__}: {exc}"))
    finally:
        conn.close()


def _run_isolated(fn, ctx, budget):
    """Run one measure in a forked child so it can be killed on timeout."""
    mpctx = mp.get_context("fork")
    recv, send = mpctx.Pipe(duplex=False)
    proc = mpctx.Process(target=_child, args=(send, fn, ctx), daemon=True)
    proc.start()
    send.close()
    if recv.poll(budget):
        try:
            status, payload = recv.recv()
        except EOFError:
            status, payload = "error", "worker exited without a result"
    else:
        proc.kill()
        status, payload = "timeout", f"exceeded budget of {budget:g} s"
    proc.join()
    recv.close()
    return status, payload


def _can_fork() -> bool:
    return "fork" in mp.get_all_start_methods()


def measure_all(
    log: EventLog,
    selection: Iterable[str] | None = None,
    budget: float = DEFAULT_BUDGET,
    options: MeasureOptions | None = None,
    isolate: bool | None = None,
) -> MeasureVector:
    """Compute the selected measures, each on its own clock.

    A measure that raises or exceeds ``budget`` seconds yields a flagged
    cell (``"error"`` or ``"timeout"``) instead of aborting the run. With
    ``isolate`` (default: on whenever the budget is below the 12 h default
    and ``fork`` is available) each measure runs in a child process that is
    killed at the deadline; otherwise overruns are detected after the fact.
    """
    labels = list(ALL_LABELS if selection is None else selection)
    for label in labels:
        _measure_fn(label)  # reject unknown labels before any work
    options = options or MeasureOptions()
    if isolate is None:
        isolate = budget < DEFAULT_BUDGET and _can_fork()
    ctx = _Context(log, options)
    out = MeasureVector()
    for label in labels:
        fn = _measure_fn(label)
        start = time.perf_counter()
        if budget <= 0:
            status, payload = "timeout", "zero budget"
        elif isolate:
            status, payload = _run_isolated(fn, ctx, budget)
        else:
            try:
                status, payload = "ok", fn(ctx)
            except Exception as exc:
                status, payload = "error", f"{type(exc).__name__}: {exc}"
                traceback.clear_frames(exc.__traceback__)
        elapsed = time.perf_counter() - start
        if status == "ok" and elapsed > budget:
            status, payload = "timeout", f"exceeded budget of {budget:g} s"
        out.seconds[label] = elapsed
        if status == "ok":
            out.values[label] = payload
        else:
            out.flags[label] = status
            out.messages[label] = payload
    return out


def timing_summary(vectors: Sequence[MeasureVector], labels: Sequence[str]) -> dict[str, dict[str, float]]:
    """AVG/MAX/MIN/MEDIAN seconds per measure across a batch."""
    out = {}
    for label in labels:
        ts = [v.seconds[label] for v in vectors if label in v.seconds]
        if not ts:
            continue
        out[label] = {
            "AVG": statistics.fmean(ts),
            "MAX": max(ts),
            "MIN": min(ts),
            "MEDIAN": statistics.median(ts),
        }
    return out
