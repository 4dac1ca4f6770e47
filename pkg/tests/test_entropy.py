import math
import random

import pytest

from epa_complexity.automaton import EpaBuilder, PartitionStats, build_epa_from_log, partition_stats
from epa_complexity.entropy import (
    entropy_report, normalized_sequence_entropy, normalized_variant_entropy, partition_entropy,
    sequence_entropy, variant_entropy,
)
from epa_complexity.generator import LogSpec, generate
from epa_complexity.log import trace_order_log

from conftest import seq_log


def stats_of(log, order="trace"):
    return partition_stats(build_epa_from_log(log, order))


def test_partition_entropy_values():
    assert partition_entropy(6, [6]) == 0
    assert partition_entropy(13, [6, 5, 1, 1]) == pytest.approx(14.5465, abs=1e-4)
    assert partition_entropy(22, [12, 8, 1, 1]) == pytest.approx(21.5485, abs=1e-4)
    with pytest.raises(ValueError):
        partition_entropy(5, [2, 2])
    with pytest.raises(ValueError):
        partition_entropy(0, [])


def test_fig2_report(fig2_log):
    rep = entropy_report(stats_of(fig2_log))
    assert rep.variant_entropy == pytest.approx(14.5465, abs=1e-4)
    assert rep.sequence_entropy == pytest.approx(21.5485, abs=1e-4)
    assert rep.normalized_variant_entropy == pytest.approx(14.5465 / 33.3443, abs=1e-4)
    assert rep.normalized_sequence_entropy == pytest.approx(21.5485 / 68.0029, abs=1e-4)
    assert set(rep.as_dict()) == {"var-e", "seq-e", "nvar-e", "nseq-e"}


def test_single_variant_is_zero():
    rep = entropy_report(stats_of(seq_log(["abc"] * 5)))
    assert rep.as_dict() == {"var-e": 0, "seq-e": 0, "nvar-e": 0, "nseq-e": 0}
    empty = entropy_report(PartitionStats((), ()))
    assert empty.sequence_entropy == 0 and empty.normalized_variant_entropy == 0


def test_disjoint_variants_closed_form():
    st = stats_of(seq_log(["abc", "xyz"]))
    assert variant_entropy(st) == pytest.approx(6 * math.log(2))
    assert sequence_entropy(st) == pytest.approx(6 * math.log(2))
    assert normalized_sequence_entropy(st) == pytest.approx(math.log(2) / math.log(6))


def test_all_singleton_partitions_normalize_to_one():
    st = PartitionStats((1, 1, 1, 1), (1, 1, 1, 1))
    assert normalized_variant_entropy(st) == pytest.approx(1.0)
    assert normalized_sequence_entropy(st) == pytest.approx(1.0)


def test_range_and_zero_iff_single_part():
    rng = random.Random(2)
    for _ in range(500):
        parts = [rng.randint(1, 50) for _ in range(rng.randint(1, 6))]
        h = partition_entropy(sum(parts), parts)
        assert h >= 0
        assert (h == 0) == (len(parts) == 1)
        st = PartitionStats(tuple(parts), tuple(parts))
        assert 0 <= normalized_sequence_entropy(st) <= 1


def _random_builder(rng):
    b = EpaBuilder()
    cases = []
    for c in range(rng.randint(1, 8)):
        cid = f"c{c}"
        cases.append(cid)
        for _ in range(rng.randint(1, 6)):
            b.add(cid, rng.choice("abcd"))
    return b, cases


def lemma1_trials(n, seed):
    """Yield (E_s before, E_s after, partitions after) for random single-event appends."""
    rng = random.Random(seed)
    for _ in range(n):
        b, cases = _random_builder(rng)
        before = sequence_entropy(partition_stats(b.freeze()))
        cid = rng.choice(cases + ["fresh"])
        b.add(cid, rng.choice("abcde"))
        after_st = partition_stats(b.freeze())
        yield before, sequence_entropy(after_st), len(after_st.event_counts)


def test_lemma1_monotone_in_events():
    violations = 0
    for before, after, k in lemma1_trials(1000, seed=7):
        if after < before or (k >= 2 and not after > before) or (k == 1 and after != 0):
            violations += 1
    assert violations == 0


def test_o1_identical_vs_distinct():
    n, l = 6, 4
    same = generate(LogSpec(n_traces=n, trace_length=l, alphabet_size=n * l, profile="identical"))
    diff = generate(LogSpec(n_traces=n, trace_length=l, alphabet_size=n * l, profile="all_distinct"))
    assert same.n_events == diff.n_events and len(same) == len(diff)
    assert sequence_entropy(stats_of(same)) == 0
    assert sequence_entropy(stats_of(diff)) == pytest.approx(n * l * math.log(n))


def test_o2_duplication_adds_exactly_es():
    rng = random.Random(3)
    checked = 0
    for seed in range(200):
        base = LogSpec(n_traces=rng.randint(2, 12), trace_length=(1, 7), alphabet_size=3, seed=seed)
        es = sequence_entropy(stats_of(generate(base)))
        if es <= 1:
            continue
        es2 = sequence_entropy(stats_of(generate(LogSpec.duplicated(base))))
        assert es2 > es
        # 2|S| log 2 - sum 2|seq_i| log 2 vanishes, so the gain is E_s itself
        assert es2 - es == pytest.approx(es, rel=1e-12)
        checked += 1
    assert checked > 100


def test_o3_merged_partition_summand():
    rest = [3, 7]
    for n in range(1, 60):
        # the merged summand exceeds the split summands by 2n log 2 > 0
        assert (2 * n) * math.log(2 * n) > 2 * (n * math.log(n)) if n > 1 else True
        total = sum(rest) + 2 * n
        split = partition_entropy(total, rest + [n, n])
        merged = partition_entropy(total, rest + [2 * n])
        assert split - merged == pytest.approx(2 * n * math.log(2))
        assert split > merged


def test_log_base_is_natural(fig2_log):
    st = stats_of(fig2_log)
    assert sequence_entropy(st) == pytest.approx(22 * math.log(22) - 12 * math.log(12) - 8 * math.log(8))
    assert len(trace_order_log(fig2_log)) == 22
