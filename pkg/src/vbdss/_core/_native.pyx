# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels: triple index and bounded edit distance.

Behavioural twin of ``_pure``; keep the two in lockstep. The index layout
is the same three nested-dict orderings; the win comes from C-level
attribute access, typed loop variables, and a C working array in the
edit-distance band.
"""

BACKEND = "native"

WILD = -1

from cpython.mem cimport PyMem_Free, PyMem_Malloc


cdef class TripleIndex:
    cdef dict _spo
    cdef dict _pos
    cdef dict _osp
    cdef dict _s_total
    cdef dict _p_total
    cdef dict _o_total
    cdef long _size

    def __cinit__(self):
        self._spo = {}
        self._pos = {}
        self._osp = {}
        self._s_total = {}
        self._p_total = {}
        self._o_total = {}
        self._size = 0

    def __len__(self):
        return self._size

    cpdef bint add(self, long s, long p, long o):
        cdef dict by_p = self._spo.get(s)
        if by_p is None:
            by_p = {}
            self._spo[s] = by_p
        cdef set objects = by_p.get(p)
        if objects is None:
            objects = set()
            by_p[p] = objects
        if o in objects:
            return False
        objects.add(o)

        cdef dict by_o = self._pos.get(p)
        if by_o is None:
            by_o = {}
            self._pos[p] = by_o
        cdef set subjects = by_o.get(o)
        if subjects is None:
            subjects = set()
            by_o[o] = subjects
        subjects.add(s)

        cdef dict by_s = self._osp.get(o)
        if by_s is None:
            by_s = {}
            self._osp[o] = by_s
        cdef set predicates = by_s.get(s)
        if predicates is None:
            predicates = set()
            by_s[s] = predicates
        predicates.add(p)

        self._s_total[s] = self._s_total.get(s, 0) + 1
        self._p_total[p] = self._p_total.get(p, 0) + 1
        self._o_total[o] = self._o_total.get(o, 0) + 1
        self._size += 1
        return True

    cpdef bint discard(self, long s, long p, long o):
        cdef dict by_p = self._spo.get(s)
        if by_p is None:
            return False
        cdef set objects = by_p.get(p)
        if objects is None or o not in objects:
            return False
        objects.remove(o)
        if not objects:
            del by_p[p]
            if not by_p:
                del self._spo[s]
        cdef set subjects = self._pos[p][o]
        subjects.remove(s)
        if not subjects:
            del self._pos[p][o]
            if not self._pos[p]:
                del self._pos[p]
        cdef set predicates = self._osp[o][s]
        predicates.remove(p)
        if not predicates:
            del self._osp[o][s]
            if not self._osp[o]:
                del self._osp[o]
        if self._s_total[s] == 1:
            del self._s_total[s]
        else:
            self._s_total[s] = self._s_total[s] - 1
        if self._p_total[p] == 1:
            del self._p_total[p]
        else:
            self._p_total[p] = self._p_total[p] - 1
        if self._o_total[o] == 1:
            del self._o_total[o]
        else:
            self._o_total[o] = self._o_total[o] - 1
        self._size -= 1
        return True

    cpdef bint contains(self, long s, long p, long o):
        cdef dict by_p = self._spo.get(s)
        if by_p is None:
            return False
        cdef set objects = by_p.get(p)
        if objects is None:
            return False
        return o in objects

    def triples(self):
        cdef long s, p
        for s, by_p in self._spo.items():
            for p, objects in by_p.items():
                for o in objects:
                    yield (s, p, o)

    def match(self, long s, long p, long o):
        cdef bint bs = s != WILD
        cdef bint bp = p != WILD
        cdef bint bo = o != WILD
        cdef list out = []
        cdef dict inner
        cdef set leaves
        cdef long key, leaf
        if bs and bp and bo:
            if self.contains(s, p, o):
                out.append((s, p, o))
        elif bs and bp:
            inner = self._spo.get(s)
            if inner is not None:
                leaves = inner.get(p)
                if leaves is not None:
                    for leaf in leaves:
                        out.append((s, p, leaf))
        elif bp and bo:
            inner = self._pos.get(p)
            if inner is not None:
                leaves = inner.get(o)
                if leaves is not None:
                    for leaf in leaves:
                        out.append((leaf, p, o))
        elif bo and bs:
            inner = self._osp.get(o)
            if inner is not None:
                leaves = inner.get(s)
                if leaves is not None:
                    for leaf in leaves:
                        out.append((s, leaf, o))
        elif bs:
            inner = self._spo.get(s)
            if inner is not None:
                for key, leaves in inner.items():
                    for leaf in leaves:
                        out.append((s, key, leaf))
        elif bp:
            inner = self._pos.get(p)
            if inner is not None:
                for key, leaves in inner.items():
                    for leaf in leaves:
                        out.append((leaf, p, key))
        elif bo:
            inner = self._osp.get(o)
            if inner is not None:
                for key, leaves in inner.items():
                    for leaf in leaves:
                        out.append((key, leaf, o))
        else:
            out = list(self.triples())
        return out

    def count(self, long s, long p, long o):
        cdef bint bs = s != WILD
        cdef bint bp = p != WILD
        cdef bint bo = o != WILD
        cdef dict inner
        cdef set leaves
        if bs and bp and bo:
            return 1 if self.contains(s, p, o) else 0
        if bs and bp:
            inner = self._spo.get(s)
            leaves = inner.get(p) if inner is not None else None
            return len(leaves) if leaves is not None else 0
        if bp and bo:
            inner = self._pos.get(p)
            leaves = inner.get(o) if inner is not None else None
            return len(leaves) if leaves is not None else 0
        if bo and bs:
            inner = self._osp.get(o)
            leaves = inner.get(s) if inner is not None else None
            return len(leaves) if leaves is not None else 0
        if bs:
            return self._s_total.get(s, 0)
        if bp:
            return self._p_total.get(p, 0)
        if bo:
            return self._o_total.get(o, 0)
        return self._size

    def index_views(self):
        return self._spo, self._pos, self._osp


def bounded_levenshtein(str a, str b, int limit):
    """Levenshtein distance capped at limit + 1; banded unit-cost DP."""
    cdef int la = len(a)
    cdef int lb = len(b)
    cdef int big = limit + 1
    if la - lb > limit or lb - la > limit:
        return big
    if la == 0:
        return lb
    if lb == 0:
        return la
    cdef int* prev = <int*> PyMem_Malloc((lb + 1) * sizeof(int))
    cdef int* cur = <int*> PyMem_Malloc((lb + 1) * sizeof(int))
    if prev == NULL or cur == NULL:
        PyMem_Free(prev)
        PyMem_Free(cur)
        raise MemoryError()
    cdef int i, j, lo, hi, cost, best, up, left, row_min, result
    cdef Py_UCS4 ca
    cdef int* tmp
    try:
        for j in range(lb + 1):
            prev[j] = j if j < big else big
        for i in range(1, la + 1):
            cur[0] = i if i < big else big
            lo = i - limit
            if lo < 1:
                lo = 1
            hi = i + limit
            if hi > lb:
                hi = lb
            if lo > 1:
                cur[lo - 1] = big
            ca = a[i - 1]
            row_min = cur[0] if lo == 1 else big
            for j in range(lo, hi + 1):
                cost = 0 if ca == <Py_UCS4> b[j - 1] else 1
                best = prev[j - 1] + cost
                up = prev[j] + 1
                left = cur[j - 1] + 1
                if up < best:
                    best = up
                if left < best:
                    best = left
                if best > big:
                    best = big
                cur[j] = best
                if best < row_min:
                    row_min = best
            for j in range(hi + 1, lb + 1):
                cur[j] = big
            if row_min > limit:
                return big
            tmp = prev
            prev = cur
            cur = tmp
        result = prev[lb]
        return result if result <= limit else big
    finally:
        PyMem_Free(prev)
        PyMem_Free(cur)
