# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled BPE kernels over a flat symbol buffer.

Words occupy ``symbols[starts[w] : starts[w] + lengths[w]]``; merging shrinks
``lengths[w]`` in place. Pair keys are returned as ``(left_id, right_id)``.
"""

from libcpp.unordered_map cimport unordered_map
from cython.operator cimport dereference as deref, preincrement as inc


cdef inline long long _code(int a, int b) nogil:
    return (<long long>a << 32) | <unsigned int>b


cdef dict _to_dict(unordered_map[long long, long long]& m):
    cdef dict out = {}
    cdef unordered_map[long long, long long].iterator it = m.begin()
    cdef long long k
    while it != m.end():
        if deref(it).second != 0:
            k = deref(it).first
            out[(<int>(k >> 32), <int>(k & 0xffffffff))] = deref(it).second
        inc(it)
    return out


def count_pairs(int[::1] symbols, long long[::1] starts, int[::1] lengths,
                long long[::1] freqs):
    cdef unordered_map[long long, long long] counts
    cdef Py_ssize_t w, i, s, n
    cdef long long f
    with nogil:
        for w in range(starts.shape[0]):
            s = starts[w]
            n = lengths[w]
            f = freqs[w]
            for i in range(n - 1):
                counts[_code(symbols[s + i], symbols[s + i + 1])] += f
    return _to_dict(counts)


def merge_pair(int[::1] symbols, long long[::1] starts, int[::1] lengths,
               long long[::1] freqs, int a, int b, int new):
    """Replace every left-to-right non-overlapping (a, b) by ``new``.

    Returns the change in weighted pair counts caused by the merge.
    """
    cdef unordered_map[long long, long long] delta
    cdef Py_ssize_t w, i, j, s, n
    cdef long long f
    cdef bint found
    with nogil:
        for w in range(starts.shape[0]):
            s = starts[w]
            n = lengths[w]
            found = False
            for i in range(n - 1):
                if symbols[s + i] == a and symbols[s + i + 1] == b:
                    found = True
                    break
            if not found:
                continue
            f = freqs[w]
            for i in range(n - 1):
                delta[_code(symbols[s + i], symbols[s + i + 1])] -= f
            i = 0
            j = 0
            while i < n:
                if i < n - 1 and symbols[s + i] == a and symbols[s + i + 1] == b:
                    symbols[s + j] = new
                    i += 2
                else:
                    symbols[s + j] = symbols[s + i]
                    i += 1
                j += 1
            lengths[w] = j
            for i in range(j - 1):
                delta[_code(symbols[s + i], symbols[s + i + 1])] += f
    return _to_dict(delta)
