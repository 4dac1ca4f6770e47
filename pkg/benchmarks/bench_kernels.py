"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--scale 1.0] [--repeat 3]

Inputs are synthetic and roughly SEPSIS-sized at scale 1 (about 1000
traces, 850 variants, 15k events).
"""

import argparse
import time

import numpy as np

from epa_complexity import _kernels
from epa_complexity.automaton import encode_events
from epa_complexity.generator import LogSpec, generate
from epa_complexity.log import to_plain_log, variants


def _workloads(scale):
    log = generate(LogSpec(n_traces=int(1050 * scale), trace_length=(3, 30), alphabet_size=16, seed=7))
    plain = to_plain_log(log)
    cases, acts, labels = encode_events(plain)
    vs = variants(log)
    ids = {}
    seqs = [[ids.setdefault(a, len(ids)) for a in v.activity_sequence] for v in vs]
    flat = np.asarray([x for s in seqs for x in s], dtype=np.int64)
    off = np.cumsum([0] + [len(s) for s in seqs]).astype(np.int64)
    w = np.asarray([v.frequency for v in vs], dtype=np.int64)
    pairs = [sorted(set(zip(s, s[1:]))) for s in seqs]
    pid = {}
    for ps in pairs:
        for p in ps:
            pid.setdefault(p, len(pid))
    jsets = [sorted(pid[p] for p in ps) for ps in pairs]
    jflat = np.asarray([x for s in jsets for x in s], dtype=np.int64)
    joff = np.cumsum([0] + [len(s) for s in jsets]).astype(np.int64)
    return {
        "build_epa": (cases, acts, len(labels)),
        "lz76": (acts,),
        "pairwise_levenshtein_sum": (flat.astype(np.int32), off, w),
        "pairwise_jaccard_sum": (jflat, joff, w),
    }


def _time(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--scale", type=float, default=1.0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = _kernels.backends()
    if "compiled" not in backends:
        print("compiled extension not built; only the fallback is timed")
    work = _workloads(args.scale)
    print(f"{'kernel':<26}{'python s':>12}{'compiled s':>12}{'speedup':>10}  same")
    for name, fargs in work.items():
        py_t, py_out = _time(getattr(backends["python"], name), fargs, 1)
        if "compiled" in backends:
            c_t, c_out = _time(getattr(backends["compiled"], name), fargs, args.repeat)
            if isinstance(py_out, tuple):
                same = all(np.array_equal(a, b) for a, b in zip(py_out, c_out))
            else:
                same = py_out == c_out
            print(f"{name:<26}{py_t:>12.4f}{c_t:>12.4f}{py_t / c_t:>9.1f}x  {same}")
        else:
            print(f"{name:<26}{py_t:>12.4f}{'-':>12}{'-':>10}")


if __name__ == "__main__":
    main()
