"""Graph-entropy measures over the partitions of a prefix automaton.

All four measures share one kernel, ``n ln n - sum(n_i ln n_i)``. Natural
logarithms throughout; the normalized forms do not depend on the base.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .automaton import PartitionStats

LOG_BASE = "e"


def _xlogx(n: int) -> float:
    return n * math.log(n) if n > 1 else 0.0


def partition_entropy(total: int, parts: Sequence[int]) -> float:
    if not parts:
        raise ValueError("parts must be non-empty")
    if any(p < 1 for p in parts):
        raise ValueError("parts must be positive")
    if sum(parts) != total:
        raise ValueError(f"parts sum to {sum(parts)}, expected {total}")
    if len(parts) == 1:
        return 0.0
    return max(0.0, _xlogx(total) - math.fsum(_xlogx(p) for p in parts))


def variant_entropy(stats: PartitionStats) -> float:
    if not stats.state_counts:
        return 0.0
    return partition_entropy(stats.n_states, stats.state_counts)


def sequence_entropy(stats: PartitionStats) -> float:
    if not stats.event_counts:
        return 0.0
    return partition_entropy(stats.n_events, stats.event_counts)


def normalized_variant_entropy(stats: PartitionStats) -> float:
    n = stats.n_states
    if n <= 1:
        return 0.0
    return variant_entropy(stats) / _xlogx(n)


def normalized_sequence_entropy(stats: PartitionStats) -> float:
    n = stats.n_events
    if n <= 1:
        return 0.0
    return sequence_entropy(stats) / _xlogx(n)


@dataclass(frozen=True)
class EntropyReport:
    variant_entropy: float
    normalized_variant_entropy: float
    sequence_entropy: float
    normalized_sequence_entropy: float

    def as_dict(self) -> dict[str, float]:
        return {
            "var-e": self.variant_entropy,
            "seq-e": self.sequence_entropy,
            "nvar-e": self.normalized_variant_entropy,
            "nseq-e": self.normalized_sequence_entropy,
        }


def entropy_report(stats: PartitionStats) -> EntropyReport:
    return EntropyReport(
        variant_entropy(stats),
        normalized_variant_entropy(stats),
        sequence_entropy(stats),
        normalized_sequence_entropy(stats),
    )
