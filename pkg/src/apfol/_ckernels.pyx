# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for conjunction closure and quantifier projection.

Same interface and results as :mod:`apfol._kernels_py`.  Masks arrive and
leave as Python ints and are held internally as little-endian uint64 words.
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport free, malloc, realloc
from libc.string cimport memcmp, memcpy, memset

cnp.import_array()

BACKEND = "cython"


cdef inline int _words_for(list masks):
    cdef int bits = 1
    for m in masks:
        bits = max(bits, (<object>m).bit_length())
    return (bits + 63) // 64


cdef cnp.ndarray _to_words(list masks, int w):
    cdef cnp.ndarray out = np.zeros((max(len(masks), 1), w), dtype=np.uint64)
    for i, m in enumerate(masks):
        out[i] = np.frombuffer((<object>m).to_bytes(w * 8, "little"), dtype=np.uint64)
    return out


cdef inline uint64_t _hash(const uint64_t* key, int w, int64_t part) noexcept nogil:
    cdef uint64_t h = 1469598103934665603ULL
    cdef int k
    for k in range(w):
        h = (h ^ key[k]) * 1099511628211ULL
        h ^= h >> 29
    h = (h ^ <uint64_t>part) * 1099511628211ULL
    return h ^ (h >> 31)


cdef struct States:
    int w  # words per state: mask A then mask B
    int64_t count, cap, table_size
    uint64_t* keys
    int64_t* part
    int64_t* parent
    int64_t* atom
    int64_t* table


cdef int _init(States* st, int w) except -1:
    st.w, st.count, st.cap, st.table_size = w, 0, 0, 256
    st.keys = NULL
    st.part = st.parent = st.atom = NULL
    st.table = <int64_t*>malloc(256 * sizeof(int64_t))
    if st.table == NULL:
        raise MemoryError()
    memset(st.table, 0xFF, 256 * sizeof(int64_t))
    return _grow(st)


cdef void _free(States* st) noexcept:
    free(st.keys)
    free(st.part)
    free(st.parent)
    free(st.atom)
    free(st.table)


cdef void* _resize(void* p, size_t nbytes) except NULL:
    cdef void* q = realloc(p, nbytes)
    if q == NULL:
        raise MemoryError()
    return q


cdef int _grow(States* st) except -1:
    cdef int64_t cap = 64 if st.cap == 0 else 2 * st.cap
    st.keys = <uint64_t*>_resize(st.keys, cap * st.w * sizeof(uint64_t))
    st.part = <int64_t*>_resize(st.part, cap * sizeof(int64_t))
    st.parent = <int64_t*>_resize(st.parent, cap * sizeof(int64_t))
    st.atom = <int64_t*>_resize(st.atom, cap * sizeof(int64_t))
    st.cap = cap
    return 0


cdef int _rehash(States* st) except -1:
    cdef int64_t size = 2 * st.table_size, s, slot
    cdef int64_t* table = <int64_t*>malloc(size * sizeof(int64_t))
    if table == NULL:
        raise MemoryError()
    memset(table, 0xFF, size * sizeof(int64_t))
    for s in range(st.count):
        slot = <int64_t>(_hash(st.keys + s * st.w, st.w, st.part[s]) & <uint64_t>(size - 1))
        while table[slot] >= 0:
            slot = (slot + 1) & (size - 1)
        table[slot] = s
    free(st.table)
    st.table, st.table_size = table, size
    return 0


cdef int _insert(States* st, const uint64_t* key, int64_t part, int64_t parent,
                 int64_t atom) except -1:
    cdef int64_t mask = st.table_size - 1
    cdef int64_t slot = <int64_t>(_hash(key, st.w, part) & <uint64_t>mask)
    cdef int64_t s
    while st.table[slot] >= 0:
        s = st.table[slot]
        if st.part[s] == part and memcmp(st.keys + s * st.w, key, st.w * sizeof(uint64_t)) == 0:
            return 0
        slot = (slot + 1) & mask
    if st.count == st.cap:
        _grow(st)
    s = st.count
    memcpy(st.keys + s * st.w, key, st.w * sizeof(uint64_t))
    st.part[s], st.parent[s], st.atom[s] = part, parent, atom
    st.table[slot] = s
    st.count += 1
    if 2 * st.count > st.table_size:
        _rehash(st)
    return 1


cdef object _words_to_int(const uint64_t* words, int w):
    cdef int k
    if w == 1:
        return words[0]
    out = 0
    for k in range(w - 1, -1, -1):
        out = (out << 64) | words[k]
    return out


def closure(masks_a, masks_b, atom_class, trans, start, max_atoms):
    """Close atoms under conjunction up to ``max_atoms`` conjuncts.

    See :func:`apfol._kernels_py.closure`; results are identical, state for
    state.
    """
    masks_a, masks_b = list(masks_a), list(masks_b)
    cdef int wa = _words_for(masks_a), wb = _words_for(masks_b)
    cdef int w = wa + wb
    cdef cnp.ndarray atoms_arr = np.hstack([_to_words(masks_a, wa), _to_words(masks_b, wb)])
    cdef uint64_t[:, ::1] M = np.ascontiguousarray(atoms_arr)
    cdef int64_t[::1] cls = np.ascontiguousarray(atom_class, dtype=np.int64).reshape(-1)
    cdef int64_t[:, ::1] T = np.ascontiguousarray(trans, dtype=np.int64).reshape(len(trans), -1)
    cdef int64_t n_atoms = len(masks_a)
    cdef uint64_t[::1] key = np.zeros(w, dtype=np.uint64)
    cdef States st
    cdef int64_t j, s, lo, hi, sp, round_
    cdef int k
    cdef uint64_t* row
    cdef bint empty

    _init(&st, w)
    try:
        for j in range(n_atoms):
            _insert(&st, &M[j, 0], T[start, cls[j]], -1, j)
        lo, hi = 0, st.count
        for round_ in range(max_atoms - 1):
            for s in range(lo, hi):
                empty = True
                for k in range(w):
                    if st.keys[s * w + k]:
                        empty = False
                        break
                if empty:
                    continue
                sp = st.part[s]
                for j in range(n_atoms):
                    row = st.keys + s * w  # may move when the buffer grows
                    for k in range(w):
                        key[k] = row[k] & M[j, k]
                    _insert(&st, &key[0], T[sp, cls[j]], s, j)
            lo, hi = hi, st.count

        out_a, out_b, parts, reps = [], [], [], []
        for s in range(st.count):
            out_a.append(_words_to_int(st.keys + s * w, wa))
            out_b.append(_words_to_int(st.keys + s * w + wa, wb))
            parts.append(st.part[s])
            rep = (st.atom[s],)
            reps.append(rep if st.parent[s] < 0 else reps[st.parent[s]] + rep)
        return out_a, out_b, parts, reps
    finally:
        _free(&st)


cdef void _project_bits(unsigned char* buf, int64_t n, int v, const unsigned char* flags,
                        unsigned char* scratch) noexcept nogil:
    """In place: ``buf[:n**v]`` becomes the projected ``buf[:n**2]``."""
    cdef int level
    cdef int64_t block = 1, e, i
    cdef unsigned char acc
    for level in range(v - 1):
        block *= n
    for level in range(v - 1, 1, -1):
        for i in range(block):
            if flags[level - 2]:
                acc = 0
                for e in range(n):
                    acc |= buf[e * block + i]
            else:
                acc = 1
                for e in range(n):
                    acc &= buf[e * block + i]
            scratch[i] = acc
        for i in range(block):
            buf[i] = scratch[i]
        block //= n


cdef object _bits_to_int(const unsigned char* buf, int64_t nbits):
    cdef uint64_t r = 0
    cdef int64_t i
    if nbits <= 64:
        for i in range(nbits):
            if buf[i]:
                r |= (<uint64_t>1) << i
        return r
    out = 0
    for i in range(nbits - 1, -1, -1):
        out = (out << 1) | buf[i]
    return out


cdef void _unpack(object mask, unsigned char* buf, int64_t nbits):
    cdef int64_t i, k
    cdef uint64_t word
    for k in range(0, nbits, 64):
        word = <uint64_t>((mask >> k) & 0xFFFFFFFFFFFFFFFF)
        for i in range(k, min(k + 64, nbits)):
            buf[i] = (word >> (i - k)) & 1


def project(mask, n, v, prefix):
    """See :func:`apfol._kernels_py.project`."""
    return project_states([mask], [mask], [0], n, n, v, [prefix])[0][2]


def project_states(masks_a, masks_b, selected, n_a, n_b, v, prefixes):
    """See :func:`apfol._kernels_py.project_states`."""
    cdef int64_t ta = n_a ** v, tb = n_b ** v
    cdef int64_t pa = n_a ** min(v, 2), pb = n_b ** min(v, 2)
    cdef int m = max(v - 2, 1)
    selected = list(selected)
    cdef int64_t n_sel = len(selected), i, pid
    cdef unsigned char[:, ::1] ua = np.zeros((max(n_sel, 1), max(ta, 1)), dtype=np.uint8)
    cdef unsigned char[:, ::1] ub = np.zeros((max(n_sel, 1), max(tb, 1)), dtype=np.uint8)
    cdef unsigned char[::1] scratch = np.zeros(max(ta, tb, 1), dtype=np.uint8)
    cdef unsigned char[::1] work_a = np.zeros(max(ta, 1), dtype=np.uint8)
    cdef unsigned char[::1] work_b = np.zeros(max(tb, 1), dtype=np.uint8)
    cdef unsigned char[:, ::1] flags = np.zeros((max(len(prefixes), 1), m), dtype=np.uint8)
    for pid, prefix in enumerate(prefixes):
        for i, kind in enumerate(prefix):
            flags[pid, i] = bool(kind)
    for i, s in enumerate(selected):
        _unpack(masks_a[s], &ua[i, 0], ta)
        _unpack(masks_b[s], &ub[i, 0], tb)
    out = []
    for pid in range(len(prefixes)):
        for i in range(n_sel):
            memcpy(&work_a[0], &ua[i, 0], ta)
            memcpy(&work_b[0], &ub[i, 0], tb)
            _project_bits(&work_a[0], n_a, v, &flags[pid, 0], &scratch[0])
            _project_bits(&work_b[0], n_b, v, &flags[pid, 0], &scratch[0])
            out.append((pid, selected[i], _bits_to_int(&work_a[0], pa), _bits_to_int(&work_b[0], pb)))
    return out
