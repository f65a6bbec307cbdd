# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: tokenizer, vocabulary counting, SVM epoch loop.

Semantics follow domain_sieve._kernels_py (the reference implementation).
tokenize and doc_counts must be bit-identical to the reference; svm_epochs
visits coordinates in the same seeded order but may round differently.
"""

from libc.stdlib cimport free, malloc, qsort
from libc.string cimport memset
from libc.math cimport INFINITY

cimport numpy as cnp

import numpy as np

from domain_sieve.token_rules import NUM_TOKEN, PUNCT_CHARS

cnp.import_array()

IMPLEMENTATION = "compiled"

cdef extern from "Python.h":
    int PyUnicode_KIND(object o) nogil
    void* PyUnicode_DATA(object o) nogil
    Py_UCS4 PyUnicode_READ(int kind, void* data, Py_ssize_t index) nogil
    Py_ssize_t PyUnicode_GET_LENGTH(object o) nogil
    object PyUnicode_Substring(object s, Py_ssize_t start, Py_ssize_t end)
    bint Py_UNICODE_ISSPACE(Py_UCS4 ch) nogil
    bint Py_UNICODE_ISDIGIT(Py_UCS4 ch) nogil


# --- punctuation tables, built once from the shared frozen constant ---

cdef bint _PUNCT_ASCII[128]
cdef Py_UCS4* _PUNCT_EXT = NULL
cdef Py_ssize_t _PUNCT_EXT_N = 0


def _build_punct_tables():
    global _PUNCT_EXT, _PUNCT_EXT_N
    cdef Py_ssize_t i
    for i in range(128):
        _PUNCT_ASCII[i] = False
    ext = sorted({ord(ch) for ch in PUNCT_CHARS if ord(ch) >= 128})
    for ch in PUNCT_CHARS:
        if ord(ch) < 128:
            _PUNCT_ASCII[ord(ch)] = True
    _PUNCT_EXT_N = len(ext)
    _PUNCT_EXT = <Py_UCS4*>malloc(max(_PUNCT_EXT_N, 1) * sizeof(Py_UCS4))
    if _PUNCT_EXT == NULL:
        raise MemoryError()
    for i in range(_PUNCT_EXT_N):
        _PUNCT_EXT[i] = <Py_UCS4>ext[i]


_build_punct_tables()


cdef inline bint _is_punct(Py_UCS4 ch) nogil:
    cdef Py_ssize_t lo, hi, mid
    if ch < 128:
        return _PUNCT_ASCII[ch]
    lo = 0
    hi = _PUNCT_EXT_N
    while lo < hi:
        mid = (lo + hi) >> 1
        if _PUNCT_EXT[mid] < ch:
            lo = mid + 1
        elif _PUNCT_EXT[mid] > ch:
            hi = mid
        else:
            return True
    return False


cdef inline unsigned long long _span_hash(int kind, void* data, Py_ssize_t s, Py_ssize_t e) nogil:
    # FNV-1a over the code points of the span
    cdef unsigned long long h = 14695981039346656037ULL
    cdef Py_ssize_t i
    for i in range(s, e):
        h = (h ^ <unsigned long long>PyUnicode_READ(kind, data, i)) * 1099511628211ULL
    return h


cdef int _cmp_int(const void* a, const void* b) noexcept nogil:
    cdef int x = (<const int*>a)[0]
    cdef int y = (<const int*>b)[0]
    return (x > y) - (x < y)


cdef class TokenTable:
    """Token -> contiguous index lookup over an open-addressing hash table.

    Tokens are stored as code points in one pool, so span lookups during
    counting never allocate Python strings. Carries a per-table count
    scratch buffer: not thread-safe, one table per worker process.
    """

    cdef Py_UCS4* pool
    cdef Py_ssize_t* off
    cdef int* slot_idx
    cdef unsigned long long* slot_hash
    cdef Py_ssize_t mask
    cdef long long* counts
    cdef int* touched
    cdef readonly Py_ssize_t size
    cdef int num_index

    def __cinit__(self, tokens):
        cdef list toks = [<str?>t for t in tokens]
        cdef Py_ssize_t size = len(toks)
        cdef Py_ssize_t total = 0
        cdef Py_ssize_t i, j, n, pos
        cdef Py_ssize_t table_size = 8
        cdef unsigned long long h
        cdef int kind
        cdef void* data
        for t in toks:
            total += PyUnicode_GET_LENGTH(t)
        while table_size < 2 * size + 2:
            table_size <<= 1

        self.pool = <Py_UCS4*>malloc(max(total, 1) * sizeof(Py_UCS4))
        self.off = <Py_ssize_t*>malloc((size + 1) * sizeof(Py_ssize_t))
        self.slot_idx = <int*>malloc(table_size * sizeof(int))
        self.slot_hash = <unsigned long long*>malloc(table_size * sizeof(unsigned long long))
        self.counts = <long long*>malloc(max(size, 1) * sizeof(long long))
        self.touched = <int*>malloc(max(size, 1) * sizeof(int))
        if (self.pool == NULL or self.off == NULL or self.slot_idx == NULL
                or self.slot_hash == NULL or self.counts == NULL or self.touched == NULL):
            raise MemoryError()
        memset(self.counts, 0, max(size, 1) * sizeof(long long))
        for i in range(table_size):
            self.slot_idx[i] = -1
        self.mask = table_size - 1
        self.size = size

        pos = 0
        self.off[0] = 0
        for i in range(size):
            t = toks[i]
            kind = PyUnicode_KIND(t)
            data = PyUnicode_DATA(t)
            n = PyUnicode_GET_LENGTH(t)
            for j in range(n):
                self.pool[pos + j] = PyUnicode_READ(kind, data, j)
            pos += n
            self.off[i + 1] = pos

        for i in range(size):
            h = self._pool_hash(i)
            j = h & self.mask
            while self.slot_idx[j] != -1:
                if self.slot_hash[j] == h and self._pool_eq(self.slot_idx[j], i):
                    raise ValueError(f"duplicate token in table: {toks[i]!r}")
                j = (j + 1) & self.mask
            self.slot_idx[j] = <int>i
            self.slot_hash[j] = h

        self.num_index = self._lookup_str(NUM_TOKEN)

    def __dealloc__(self):
        free(self.pool)
        free(self.off)
        free(self.slot_idx)
        free(self.slot_hash)
        free(self.counts)
        free(self.touched)

    cdef unsigned long long _pool_hash(self, Py_ssize_t i) nogil:
        cdef unsigned long long h = 14695981039346656037ULL
        cdef Py_ssize_t k
        for k in range(self.off[i], self.off[i + 1]):
            h = (h ^ <unsigned long long>self.pool[k]) * 1099511628211ULL
        return h

    cdef bint _pool_eq(self, Py_ssize_t a, Py_ssize_t b) nogil:
        cdef Py_ssize_t la = self.off[a + 1] - self.off[a]
        cdef Py_ssize_t lb = self.off[b + 1] - self.off[b]
        cdef Py_ssize_t k
        if la != lb:
            return False
        for k in range(la):
            if self.pool[self.off[a] + k] != self.pool[self.off[b] + k]:
                return False
        return True

    cdef int _lookup_span(self, int kind, void* data, Py_ssize_t s, Py_ssize_t e) nogil:
        cdef unsigned long long h = _span_hash(kind, data, s, e)
        cdef Py_ssize_t j = h & self.mask
        cdef int idx
        cdef Py_ssize_t k, length
        while True:
            idx = self.slot_idx[j]
            if idx == -1:
                return -1
            if self.slot_hash[j] == h:
                length = self.off[idx + 1] - self.off[idx]
                if length == e - s:
                    for k in range(length):
                        if self.pool[self.off[idx] + k] != PyUnicode_READ(kind, data, s + k):
                            break
                    else:
                        return idx
            j = (j + 1) & self.mask

    cdef int _lookup_str(self, object token):
        cdef int kind = PyUnicode_KIND(token)
        cdef void* data = PyUnicode_DATA(token)
        return self._lookup_span(kind, data, 0, PyUnicode_GET_LENGTH(token))

    def lookup(self, token):
        """Return the index of token, or -1 if absent."""
        return self._lookup_str(<str?>token)


def tokenize(text):
    """Split one sentence into tokens. See token_rules for the rule list."""
    cdef object t = (<str?>text).lower()
    cdef int kind = PyUnicode_KIND(t)
    cdef void* data = PyUnicode_DATA(t)
    cdef Py_ssize_t n = PyUnicode_GET_LENGTH(t)
    cdef Py_ssize_t i = 0, s, e, j
    cdef Py_UCS4 ch
    cdef bint all_digits
    out = []
    while i < n:
        ch = PyUnicode_READ(kind, data, i)
        if Py_UNICODE_ISSPACE(ch):
            i += 1
            continue
        s = i
        while i < n and not Py_UNICODE_ISSPACE(PyUnicode_READ(kind, data, i)):
            i += 1
        e = i
        while s < e and _is_punct(PyUnicode_READ(kind, data, s)):
            s += 1
        while e > s and _is_punct(PyUnicode_READ(kind, data, e - 1)):
            e -= 1
        if s == e:
            continue
        all_digits = True
        for j in range(s, e):
            if not Py_UNICODE_ISDIGIT(PyUnicode_READ(kind, data, j)):
                all_digits = False
                break
        out.append(NUM_TOKEN if all_digits else PyUnicode_Substring(t, s, e))
    return out


def doc_counts(TokenTable table, texts):
    """Count in-vocabulary term occurrences over a list of sentences.

    Fuses tokenization and counting; output matches the reference
    implementation exactly: (int32 sorted indices, int64 counts).
    """
    cdef int tn = 0
    cdef object t
    cdef int kind
    cdef void* data
    cdef Py_ssize_t n, i, s, e, j
    cdef Py_UCS4 ch
    cdef int idx
    cdef bint all_digits
    try:
        for text in texts:
            t = (<str?>text).lower()
            kind = PyUnicode_KIND(t)
            data = PyUnicode_DATA(t)
            n = PyUnicode_GET_LENGTH(t)
            i = 0
            while i < n:
                ch = PyUnicode_READ(kind, data, i)
                if Py_UNICODE_ISSPACE(ch):
                    i += 1
                    continue
                s = i
                while i < n and not Py_UNICODE_ISSPACE(PyUnicode_READ(kind, data, i)):
                    i += 1
                e = i
                while s < e and _is_punct(PyUnicode_READ(kind, data, s)):
                    s += 1
                while e > s and _is_punct(PyUnicode_READ(kind, data, e - 1)):
                    e -= 1
                if s == e:
                    continue
                all_digits = True
                for j in range(s, e):
                    if not Py_UNICODE_ISDIGIT(PyUnicode_READ(kind, data, j)):
                        all_digits = False
                        break
                if all_digits:
                    idx = table.num_index
                else:
                    idx = table._lookup_span(kind, data, s, e)
                if idx >= 0:
                    if table.counts[idx] == 0:
                        table.touched[tn] = idx
                        tn += 1
                    table.counts[idx] += 1
    except BaseException:
        for i in range(tn):
            table.counts[table.touched[i]] = 0
        raise

    qsort(table.touched, tn, sizeof(int), _cmp_int)
    idx_arr = np.empty(tn, dtype=np.int32)
    cnt_arr = np.empty(tn, dtype=np.int64)
    cdef int[::1] iv = idx_arr
    cdef cnp.int64_t[::1] cv = cnt_arr
    for i in range(tn):
        idx = table.touched[i]
        iv[i] = idx
        cv[i] = table.counts[idx]
        table.counts[idx] = 0
    return idx_arr, cnt_arr


def svm_epochs(int[::1] indptr, int[::1] indices, double[::1] data, double[::1] y,
               double c, double tol, long max_iter, object seed,
               double[::1] w, double[::1] alpha):
    """Dual coordinate descent epochs; see the reference module docstring."""
    cdef Py_ssize_t n = y.shape[0]
    qii_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] qii = qii_arr
    cdef Py_ssize_t i, k
    cdef int j
    cdef double s, g, a, pg, new_a, d
    cdef double gap = INFINITY
    cdef double pg_max, pg_min
    cdef long epoch

    for i in range(n):
        s = 0.0
        for j in range(indptr[i], indptr[i + 1]):
            s += data[j] * data[j]
        qii[i] = s

    rng = np.random.default_rng(seed)
    cdef int[::1] perm
    for epoch in range(1, max_iter + 1):
        perm_arr = np.ascontiguousarray(rng.permutation(n), dtype=np.intc)
        perm = perm_arr
        pg_max = -INFINITY
        pg_min = INFINITY
        with nogil:
            for k in range(n):
                i = perm[k]
                g = 0.0
                for j in range(indptr[i], indptr[i + 1]):
                    g += w[indices[j]] * data[j]
                g = y[i] * g - 1.0
                a = alpha[i]
                if a <= 0.0:
                    pg = g if g < 0.0 else 0.0
                elif a >= c:
                    pg = g if g > 0.0 else 0.0
                else:
                    pg = g
                if pg > pg_max:
                    pg_max = pg
                if pg < pg_min:
                    pg_min = pg
                if pg > 1e-12 or pg < -1e-12:
                    new_a = a - g / qii[i]
                    if new_a < 0.0:
                        new_a = 0.0
                    elif new_a > c:
                        new_a = c
                    d = (new_a - a) * y[i]
                    if d != 0.0:
                        for j in range(indptr[i], indptr[i + 1]):
                            w[indices[j]] += d * data[j]
                        alpha[i] = new_a
        gap = pg_max - pg_min
        if gap < tol:
            return epoch, True, gap
    return max_iter, False, gap
