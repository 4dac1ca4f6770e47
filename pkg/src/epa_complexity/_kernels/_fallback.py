"""Pure-Python reference implementations of the hot kernels.

Every function here has a drop-in twin in ``_core.pyx``. Both take plain
integer-coded inputs (activity ids, case ids, CSR-style flat arrays with
offsets) so the pair can be swapped without touching the callers.
"""

import numpy as np


def build_epa(case_idx, act_idx, n_activities):
    """Run the prefix-automaton construction over integer-coded events.

    Returns ``(parent, activity, partition, count)`` as int64 arrays indexed
    by state id. State 0 is the root (parent -1, activity -1, partition 0,
    count 0); created states get ids 1, 2, ... in creation order.
    """
    parent = [-1]
    activity = [-1]
    partition = [0]
    count = [0]
    n_out = [0]
    children = {}
    last = {}
    max_c = 0
    for case, act in zip(case_idx.tolist(), act_idx.tolist()):
        pred = last.get(case, 0)
        key = pred * n_activities + act
        cur = children.get(key)
        if cur is None:
            if n_out[pred] > 0:
                max_c += 1
                c = max_c
            elif pred == 0:
                # first event of the whole log
                max_c = 1
                c = 1
            else:
                c = partition[pred]
            cur = len(parent)
            parent.append(pred)
            activity.append(act)
            partition.append(c)
            count.append(0)
            n_out.append(0)
            n_out[pred] += 1
            children[key] = cur
        count[cur] += 1
        last[case] = cur
    return (
        np.asarray(parent, dtype=np.int64),
        np.asarray(activity, dtype=np.int64),
        np.asarray(partition, dtype=np.int64),
        np.asarray(count, dtype=np.int64),
    )


def levenshtein(a, b):
    """Unit-cost edit distance between two integer sequences."""
    a = list(a)
    b = list(b)
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def pairwise_levenshtein_sum(flat, offsets, weights):
    """Sum of ``w_i * w_j * d(i, j)`` over all pairs ``i < j`` of sequences."""
    seqs = [flat[offsets[i]:offsets[i + 1]].tolist() for i in range(len(offsets) - 1)]
    w = weights.tolist()
    total = 0
    for i in range(len(seqs)):
        si = seqs[i]
        wi = w[i]
        for j in range(i + 1, len(seqs)):
            total += wi * w[j] * levenshtein(si, seqs[j])
    return total


def pairwise_jaccard_sum(flat, offsets, weights):
    """Sum of ``w_i * w_j * J(i, j)`` over pairs ``i < j`` of sorted id sets.

    ``J`` is |intersection| / |union|, taken as 1 for two empty sets.
    """
    sets = [frozenset(flat[offsets[i]:offsets[i + 1]].tolist()) for i in range(len(offsets) - 1)]
    w = weights.tolist()
    total = 0.0
    for i in range(len(sets)):
        si = sets[i]
        wi = float(w[i])
        for j in range(i + 1, len(sets)):
            sj = sets[j]
            inter = len(si & sj)
            union = len(si) + len(sj) - inter
            jac = 1.0 if union == 0 else inter / union
            total += wi * w[j] * jac
    return total


def _dense_codes(seq):
    s = np.asarray(seq)
    if s.size == 0:
        return np.zeros(0, dtype=np.int64)
    return np.unique(s, return_inverse=True)[1].astype(np.int64).ravel()


def suffix_array(codes):
    """Suffix array by prefix doubling (dense integer codes in)."""
    n = len(codes)
    rank = np.asarray(codes, dtype=np.int64)
    sa = np.arange(n, dtype=np.int64)
    k = 1
    while n > 1:
        second = np.full(n, -1, dtype=np.int64)
        second[: n - k] = rank[k:] if k < n else second[:0]
        sa = np.lexsort((second, rank))
        r, s2 = rank[sa], second[sa]
        new = np.empty(n, dtype=np.int64)
        new[sa] = np.concatenate(([0], np.cumsum((r[1:] != r[:-1]) | (s2[1:] != s2[:-1]))))
        rank = new
        if rank.max() == n - 1 or k >= n:
            break
        k *= 2
    return sa


def longest_previous_factor(codes):
    """``lpf[i]``: length of the longest prefix of suffix i that also starts
    at some j < i (occurrences may overlap position i)."""
    s = list(codes)
    n = len(s)
    lpf = [0] * n
    if n == 0:
        return lpf
    sa = suffix_array(np.asarray(s, dtype=np.int64)).tolist()
    rank = [0] * n
    for r, i in enumerate(sa):
        rank[i] = r
    # Kasai: lcp[r] = lcp(sa[r - 1], sa[r])
    lcp = [0] * (n + 1)
    h = 0
    for i in range(n):
        r = rank[i]
        if r > 0:
            j = sa[r - 1]
            while i + h < n and j + h < n and s[i + h] == s[j + h]:
                h += 1
            lcp[r] = h
            if h:
                h -= 1
        else:
            h = 0
    # nearest rank on each side with a smaller text position, with the
    # running minimum of lcp between it and the current rank
    big = n + 1
    for direction in (1, -1):
        stack, gaps = [], []
        cur = big
        ranks = range(n) if direction == 1 else range(n - 1, -1, -1)
        for r in ranks:
            step = lcp[r] if direction == 1 else lcp[r + 1]
            if stack:
                cur = min(cur, step)
            while stack and sa[stack[-1]] > sa[r]:
                stack.pop()
                g = gaps.pop()
                if stack:
                    cur = min(g, cur)
            if stack and cur > lpf[sa[r]]:
                lpf[sa[r]] = cur
            if stack:
                gaps.append(cur)
            else:
                gaps.append(big)
            stack.append(r)
            cur = big
    return lpf


def lz76(seq):
    """Phrase count of the exhaustive-history LZ76 parse.

    Each phrase extends the longest previous factor at its start by one
    symbol (or runs to the end of the sequence).
    """
    codes = _dense_codes(seq)
    n = len(codes)
    lpf = longest_previous_factor(codes)
    c = p = 0
    while p < n:
        c += 1
        p += lpf[p] + 1
    return c


def lz76_scan(seq):
    """Kaspar-Schuster scan; quadratic, kept as a cross-check for ``lz76``."""
    s = seq.tolist() if hasattr(seq, "tolist") else list(seq)
    n = len(s)
    if n == 0:
        return 0
    if n == 1:
        return 1
    c = 1
    l = 1
    i = 0
    k = 1
    k_max = 1
    while True:
        if s[i + k - 1] == s[l + k - 1]:
            k += 1
            if l + k > n:
                c += 1
                break
        else:
            if k > k_max:
                k_max = k
            i += 1
            if i == l:
                c += 1
                l += k_max
                if l + 1 > n:
                    break
                i = 0
                k = 1
                k_max = 1
            else:
                k = 1
    return c
