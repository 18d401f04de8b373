# cython: language_level=3
"""Compiled kernels mirroring ``guessbench._pykernels``."""
import numpy as np

from libc.stdint cimport int32_t, int64_t, uint64_t
from libc.stdlib cimport malloc, free


cdef inline uint64_t _splitmix_next(uint64_t* state) noexcept nogil:
    state[0] += 0x9E3779B97F4A7C15ULL
    cdef uint64_t z = state[0]
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


def permutation(Py_ssize_t n, seed):
    """Fisher-Yates permutation of ``range(n)`` driven by SplitMix64."""
    cdef uint64_t state = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    arr = np.arange(n, dtype=np.int64)
    cdef int64_t[::1] perm = arr
    cdef Py_ssize_t i, j
    cdef uint64_t bound, limit, r
    cdef int64_t tmp
    with nogil:
        i = n - 1
        while i > 0:
            bound = <uint64_t>(i + 1)
            # 2**64 - (2**64 % bound), computed without 128-bit arithmetic
            limit = 0 - ((0 - bound) % bound)
            r = _splitmix_next(&state)
            while limit != 0 and r >= limit:
                r = _splitmix_next(&state)
            j = <Py_ssize_t>(r % bound)
            tmp = perm[i]
            perm[i] = perm[j]
            perm[j] = tmp
            i -= 1
    return arr.tolist()


def match_batch(list batch, test, dict ranks, Py_ssize_t offset, seen=None):
    cdef Py_ssize_t rank = offset
    cdef Py_ssize_t new = 0
    cdef object guess
    cdef bint track = seen is not None
    cdef set seen_set
    if track:
        seen_set = <set>seen
    for guess in batch:
        rank += 1
        if track:
            seen_set.add(guess)
        if guess in test and guess not in ranks:
            ranks[guess] = rank
            new += 1
    return new


cdef class MarkovCellWalker:
    cdef int64_t[::1] edge_ptr
    cdef int32_t[::1] edge_char
    cdef int32_t[::1] edge_level
    cdef int64_t[::1] edge_next
    cdef int32_t[:, ::1] min_sum
    cdef int32_t[:, ::1] max_sum
    cdef int64_t[::1] start_off
    cdef int32_t[:, ::1] start_codes
    cdef int32_t[::1] start_level
    cdef int64_t[::1] start_ctx
    cdef bytes alphabet
    cdef const unsigned char* abc
    cdef int n1, length, steps, budget
    # walk state
    cdef Py_ssize_t key, key_end
    cdef int depth
    cdef bint in_key
    cdef int64_t* pos
    cdef int64_t* end
    cdef int* needs
    cdef char* buf

    def __cinit__(self, tables, int length, int budget):
        self.pos = NULL
        self.end = NULL
        self.needs = NULL
        self.buf = NULL
        self.edge_ptr = np.ascontiguousarray(tables.edge_ptr, dtype=np.int64)
        self.edge_char = np.ascontiguousarray(tables.edge_char, dtype=np.int32)
        self.edge_level = np.ascontiguousarray(tables.edge_level, dtype=np.int32)
        self.edge_next = np.ascontiguousarray(tables.edge_next, dtype=np.int64)
        self.min_sum = np.ascontiguousarray(tables.min_sum, dtype=np.int32)
        self.max_sum = np.ascontiguousarray(tables.max_sum, dtype=np.int32)
        self.start_off = np.ascontiguousarray(tables.start_off, dtype=np.int64)
        self.start_codes = np.ascontiguousarray(tables.start_codes, dtype=np.int32)
        self.start_level = np.ascontiguousarray(tables.start_level, dtype=np.int32)
        self.start_ctx = np.ascontiguousarray(tables.start_ctx, dtype=np.int64)
        self.alphabet = bytes(tables.alphabet)
        self.abc = self.alphabet
        self.n1 = tables.order - 1
        self.length = length
        self.budget = budget
        self.steps = length - self.n1 if length >= self.n1 else 0
        cdef int k = length if length < self.n1 else self.n1
        self.key = self.start_off[k]
        self.key_end = self.start_off[k + 1]
        self.in_key = False
        self.depth = -1
        cdef int slots = self.steps if self.steps > 0 else 1
        self.pos = <int64_t*>malloc(slots * sizeof(int64_t))
        self.end = <int64_t*>malloc(slots * sizeof(int64_t))
        self.needs = <int*>malloc(slots * sizeof(int))
        self.buf = <char*>malloc(length + 1)
        if not self.pos or not self.end or not self.needs or not self.buf:
            raise MemoryError()

    def __dealloc__(self):
        free(self.pos)
        free(self.end)
        free(self.needs)
        free(self.buf)

    cdef inline object _emit(self):
        return self.buf[:self.length].decode("ascii")

    cdef inline void _load_key(self, Py_ssize_t i) noexcept:
        cdef int c
        cdef int klen = self.length if self.length < self.n1 else self.n1
        for c in range(klen):
            self.buf[c] = <char>self.abc[self.start_codes[i, c]]

    def take(self, Py_ssize_t n):
        out = []
        cdef Py_ssize_t got = 0
        cdef int d, left, rem, need
        cdef int64_t e, nxt, ctx
        cdef int steps = self.steps
        if n <= 0:
            return out
        while got < n:
            if self.in_key:
                d = self.depth
                if d < 0:
                    self.in_key = False
                    self.key += 1
                    continue
                if self.pos[d] >= self.end[d]:
                    self.depth = d - 1
                    continue
                e = self.pos[d]
                self.pos[d] = e + 1
                rem = self.needs[d] - self.edge_level[e]
                if rem < 0:
                    continue
                left = steps - d - 1
                if left == 0:
                    if rem == 0:
                        self.buf[self.n1 + d] = <char>self.abc[self.edge_char[e]]
                        out.append(self._emit())
                        got += 1
                    continue
                nxt = self.edge_next[e]
                if self.min_sum[nxt, left] <= rem <= self.max_sum[nxt, left]:
                    self.buf[self.n1 + d] = <char>self.abc[self.edge_char[e]]
                    d += 1
                    self.depth = d
                    self.pos[d] = self.edge_ptr[nxt]
                    self.end[d] = self.edge_ptr[nxt + 1]
                    self.needs[d] = rem
                continue

            if self.key >= self.key_end:
                break
            need = self.budget - self.start_level[self.key]
            if self.length < self.n1 or steps == 0:
                if need == 0:
                    self._load_key(self.key)
                    out.append(self._emit())
                    got += 1
                self.key += 1
                continue
            if need < 0:
                self.key += 1
                continue
            ctx = self.start_ctx[self.key]
            if not (self.min_sum[ctx, steps] <= need <= self.max_sum[ctx, steps]):
                self.key += 1
                continue
            self._load_key(self.key)
            self.in_key = True
            self.depth = 0
            self.pos[0] = self.edge_ptr[ctx]
            self.end[0] = self.edge_ptr[ctx + 1]
            self.needs[0] = need
        return out
