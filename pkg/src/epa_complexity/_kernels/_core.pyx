# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels. Semantics mirror ``_fallback`` exactly, including the
floating-point summation order of ``pairwise_jaccard_sum``."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int32_t, int64_t, uint64_t
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector

cnp.import_array()


def build_epa(cnp.ndarray case_idx, cnp.ndarray act_idx, int64_t n_activities):
    cdef const int64_t[::1] cases = np.ascontiguousarray(case_idx, dtype=np.int64)
    cdef const int64_t[::1] acts = np.ascontiguousarray(act_idx, dtype=np.int64)
    cdef Py_ssize_t n = cases.shape[0]
    cdef int64_t n_cases = 0
    cdef Py_ssize_t e
    for e in range(n):
        if cases[e] + 1 > n_cases:
            n_cases = cases[e] + 1

    cdef vector[int64_t] parent, activity, partition, count, n_out
    parent.reserve(n + 1)
    activity.reserve(n + 1)
    partition.reserve(n + 1)
    count.reserve(n + 1)
    n_out.reserve(n + 1)
    parent.push_back(-1)
    activity.push_back(-1)
    partition.push_back(0)
    count.push_back(0)
    n_out.push_back(0)

    cdef vector[int64_t] last = vector[int64_t](n_cases, 0)
    cdef unordered_map[int64_t, int64_t] children
    cdef unordered_map[int64_t, int64_t].iterator it
    cdef int64_t pred, key, cur, c, max_c = 0, case, act

    for e in range(n):
        case = cases[e]
        act = acts[e]
        pred = last[case]
        key = pred * n_activities + act
        it = children.find(key)
        if it != children.end():
            cur = children[key]
        else:
            if n_out[pred] > 0:
                max_c += 1
                c = max_c
            elif pred == 0:
                max_c = 1
                c = 1
            else:
                c = partition[pred]
            cur = parent.size()
            parent.push_back(pred)
            activity.push_back(act)
            partition.push_back(c)
            count.push_back(0)
            n_out.push_back(0)
            n_out[pred] += 1
            children[key] = cur
        count[cur] += 1
        last[case] = cur

    cdef Py_ssize_t m = parent.size()
    out_parent = np.empty(m, dtype=np.int64)
    out_activity = np.empty(m, dtype=np.int64)
    out_partition = np.empty(m, dtype=np.int64)
    out_count = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] p = out_parent, a = out_activity, q = out_partition, k = out_count
    cdef Py_ssize_t s
    for s in range(m):
        p[s] = parent[s]
        a[s] = activity[s]
        q[s] = partition[s]
        k[s] = count[s]
    return out_parent, out_activity, out_partition, out_count


cdef int64_t _lev(const int32_t[::1] flat, Py_ssize_t a0, Py_ssize_t a1,
                  Py_ssize_t b0, Py_ssize_t b1, int64_t* row) noexcept nogil:
    # a is the longer operand; row has room for len(b) + 1 entries
    cdef Py_ssize_t la = a1 - a0, lb = b1 - b0, i, j
    cdef int64_t diag, up, best, old
    if lb == 0:
        return la
    for j in range(lb + 1):
        row[j] = j
    for i in range(1, la + 1):
        diag = row[0]
        row[0] = i
        for j in range(1, lb + 1):
            old = row[j]
            best = old + 1
            up = row[j - 1] + 1
            if up < best:
                best = up
            up = diag + (flat[a0 + i - 1] != flat[b0 + j - 1])
            if up < best:
                best = up
            row[j] = best
            diag = old
    return row[lb]


def levenshtein(a, b):
    a_arr = np.ascontiguousarray(a, dtype=np.int32)
    b_arr = np.ascontiguousarray(b, dtype=np.int32)
    if a_arr.shape[0] < b_arr.shape[0]:
        a_arr, b_arr = b_arr, a_arr
    cdef Py_ssize_t la = a_arr.shape[0]
    cdef Py_ssize_t lb = b_arr.shape[0]
    cdef const int32_t[::1] flat = np.concatenate([a_arr, b_arr]).astype(np.int32)
    cdef vector[int64_t] row = vector[int64_t](lb + 1, 0)
    return _lev(flat, 0, la, la, la + lb, row.data())


cdef int64_t _lev_bits(const uint64_t* peq, Py_ssize_t m, const int32_t[::1] flat,
                      Py_ssize_t t0, Py_ssize_t t1) noexcept nogil:
    # bit-parallel global edit distance, pattern of length 1..64 encoded in peq
    cdef uint64_t pv = ~(<uint64_t>0), mv = 0, eq, xv, xh, ph, mh
    cdef uint64_t top = (<uint64_t>1) << (m - 1)
    cdef int64_t score = m
    cdef Py_ssize_t k
    for k in range(t0, t1):
        eq = peq[flat[k]]
        xv = eq | mv
        xh = (((eq & pv) + pv) ^ pv) | eq
        ph = mv | ~(xh | pv)
        mh = pv & xh
        if ph & top:
            score += 1
        elif mh & top:
            score -= 1
        ph = (ph << 1) | 1
        mh = mh << 1
        pv = mh | ~(xv | ph)
        mv = ph & xv
    return score


def pairwise_levenshtein_sum(flat_arr, offsets_arr, weights_arr):
    # symbols must be dense non-negative ids
    cdef const int32_t[::1] flat = np.ascontiguousarray(flat_arr, dtype=np.int32)
    cdef const int64_t[::1] off = np.ascontiguousarray(offsets_arr, dtype=np.int64)
    cdef const int64_t[::1] w = np.ascontiguousarray(weights_arr, dtype=np.int64)
    cdef Py_ssize_t m = off.shape[0] - 1, i, j, k, li
    cdef int64_t longest = 0, total = 0, d, sigma = 1
    for i in range(m):
        if off[i + 1] - off[i] > longest:
            longest = off[i + 1] - off[i]
    for k in range(flat.shape[0]):
        if flat[k] + 1 > sigma:
            sigma = flat[k] + 1
    cdef vector[int64_t] row = vector[int64_t](longest + 1, 0)
    cdef vector[uint64_t] peq = vector[uint64_t](sigma, 0)
    with nogil:
        for i in range(m):
            li = off[i + 1] - off[i]
            if 0 < li <= 64:
                for k in range(li):
                    peq[flat[off[i] + k]] |= (<uint64_t>1) << k
            for j in range(i + 1, m):
                if 0 < li <= 64:
                    d = _lev_bits(peq.data(), li, flat, off[j], off[j + 1])
                elif li >= off[j + 1] - off[j]:
                    d = _lev(flat, off[i], off[i + 1], off[j], off[j + 1], row.data())
                else:
                    d = _lev(flat, off[j], off[j + 1], off[i], off[i + 1], row.data())
                total += w[i] * w[j] * d
            if 0 < li <= 64:
                for k in range(li):
                    peq[flat[off[i] + k]] = 0
    return total


def pairwise_jaccard_sum(flat_arr, offsets_arr, weights_arr):
    # sets arrive sorted and duplicate-free
    cdef const int64_t[::1] flat = np.ascontiguousarray(flat_arr, dtype=np.int64)
    cdef const int64_t[::1] off = np.ascontiguousarray(offsets_arr, dtype=np.int64)
    cdef const int64_t[::1] w = np.ascontiguousarray(weights_arr, dtype=np.int64)
    cdef Py_ssize_t m = off.shape[0] - 1, i, j, p, q, pe, qe
    cdef int64_t inter, union_
    cdef double total = 0.0, wi, jac
    with nogil:
        for i in range(m):
            wi = <double>w[i]
            for j in range(i + 1, m):
                p = off[i]
                pe = off[i + 1]
                q = off[j]
                qe = off[j + 1]
                inter = 0
                while p < pe and q < qe:
                    if flat[p] == flat[q]:
                        inter += 1
                        p += 1
                        q += 1
                    elif flat[p] < flat[q]:
                        p += 1
                    else:
                        q += 1
                union_ = (off[i + 1] - off[i]) + (off[j + 1] - off[j]) - inter
                if union_ == 0:
                    jac = 1.0
                else:
                    jac = <double>inter / <double>union_
                total += wi * <double>w[j] * jac
    return total


cdef void _suffix_array(const int64_t* s, Py_ssize_t n, int64_t sigma, int64_t* sa) noexcept nogil:
    # prefix doubling, two stable counting sorts per round
    cdef vector[int64_t] rank = vector[int64_t](n, 0)
    cdef vector[int64_t] tmp = vector[int64_t](n, 0)
    cdef vector[int64_t] buf = vector[int64_t](n, 0)
    cdef vector[int64_t] cnt
    cdef Py_ssize_t i, k = 1
    cdef int64_t m = sigma, r, key, a, b
    for i in range(n):
        rank[i] = s[i]
    while True:
        # sort by second key (rank[i + k] + 1, 0 past the end)
        cnt.assign(m + 2, 0)
        for i in range(n):
            key = rank[i + k] + 1 if i + k < n else 0
            cnt[key] += 1
        for i in range(1, m + 2):
            cnt[i] += cnt[i - 1]
        for i in range(n - 1, -1, -1):
            key = rank[i + k] + 1 if i + k < n else 0
            cnt[key] -= 1
            buf[cnt[key]] = i
        # stable sort by first key
        cnt.assign(m + 1, 0)
        for i in range(n):
            cnt[rank[i]] += 1
        for i in range(1, m + 1):
            cnt[i] += cnt[i - 1]
        for i in range(n - 1, -1, -1):
            key = rank[buf[i]]
            cnt[key] -= 1
            sa[cnt[key]] = buf[i]
        tmp[sa[0]] = 0
        r = 0
        for i in range(1, n):
            a = sa[i - 1]
            b = sa[i]
            if rank[a] != rank[b] or (
                (rank[a + k] if a + k < n else -1) != (rank[b + k] if b + k < n else -1)
            ):
                r += 1
            tmp[b] = r
        rank.swap(tmp)
        m = r + 1
        if r == n - 1 or k >= n:
            break
        k *= 2


def longest_previous_factor(codes):
    cdef const int64_t[::1] s = np.ascontiguousarray(codes, dtype=np.int64)
    cdef Py_ssize_t n = s.shape[0]
    out = np.zeros(n, dtype=np.int64)
    if n == 0:
        return out
    cdef int64_t[::1] lpf = out
    cdef int64_t sigma = 0
    cdef Py_ssize_t i, j, r, h = 0
    for i in range(n):
        if s[i] + 1 > sigma:
            sigma = s[i] + 1
    cdef vector[int64_t] sa = vector[int64_t](n, 0)
    cdef vector[int64_t] rank = vector[int64_t](n, 0)
    cdef vector[int64_t] lcp = vector[int64_t](n + 1, 0)
    cdef vector[int64_t] stack, gaps
    cdef int64_t big = n + 1, cur, step, g
    cdef int direction
    with nogil:
        _suffix_array(&s[0], n, sigma, sa.data())
        for r in range(n):
            rank[sa[r]] = r
        for i in range(n):
            r = rank[i]
            if r > 0:
                j = sa[r - 1]
                while i + h < n and j + h < n and s[i + h] == s[j + h]:
                    h += 1
                lcp[r] = h
                if h > 0:
                    h -= 1
            else:
                h = 0
        for direction in range(2):
            stack.clear()
            gaps.clear()
            cur = big
            for i in range(n):
                r = i if direction == 0 else n - 1 - i
                step = lcp[r] if direction == 0 else lcp[r + 1]
                if stack.size() > 0 and step < cur:
                    cur = step
                while stack.size() > 0 and sa[stack.back()] > sa[r]:
                    stack.pop_back()
                    g = gaps.back()
                    gaps.pop_back()
                    if stack.size() > 0 and g < cur:
                        cur = g
                if stack.size() > 0:
                    if cur > lpf[sa[r]]:
                        lpf[sa[r]] = cur
                    gaps.push_back(cur)
                else:
                    gaps.push_back(big)
                stack.push_back(r)
                cur = big
    return out


def lz76(seq):
    s = np.asarray(seq)
    if s.size == 0:
        return 0
    codes = np.unique(s, return_inverse=True)[1].astype(np.int64).ravel()
    cdef const int64_t[::1] lpf = longest_previous_factor(codes)
    cdef Py_ssize_t n = lpf.shape[0], p = 0, c = 0
    with nogil:
        while p < n:
            c += 1
            p += lpf[p] + 1
    return c
