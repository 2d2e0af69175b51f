# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled acceptance kernels; semantics mirrored by ``pure.py``.

Each kernel object wraps one pre-compiled automaton, acquiring the transition
buffers once so that a per-string call is a single C loop.  The one-counter
run keeps a dense (state x counter) reachability matrix per input position;
the counter is bounded by the position, so the matrix never exceeds
``n_states * (n + 1)`` cells.
"""

from libc.stdlib cimport free, malloc
from libc.string cimport memset


cdef class OcaKernel:
    cdef int n_states, start
    cdef int[::1] offsets
    cdef int[::1] src
    cdef int[::1] dst
    cdef int[::1] action
    cdef const unsigned char[::1] cond_plus
    cdef const unsigned char[::1] finals
    cdef unsigned char *cur
    cdef unsigned char *nxt
    cdef int capacity

    def __cinit__(self, c):
        self.n_states = c.n_states
        self.start = c.start
        self.offsets = c.offsets
        self.src = c.src
        self.dst = c.dst
        self.action = c.action
        self.cond_plus = c.cond_plus
        self.finals = c.finals
        self.cur = NULL
        self.nxt = NULL
        self.capacity = 0

    def __dealloc__(self):
        free(self.cur)
        free(self.nxt)

    cdef int _reserve(self, int size) except -1:
        if size <= self.capacity:
            return 0
        free(self.cur)
        free(self.nxt)
        self.cur = <unsigned char *> malloc(size)
        self.nxt = <unsigned char *> malloc(size)
        if self.cur == NULL or self.nxt == NULL:
            raise MemoryError()
        self.capacity = size
        return 0

    def accepts(self, int[::1] ids) -> bool:
        cdef int n = ids.shape[0]
        cdef int width = n + 1
        cdef int size = self.n_states * width
        self._reserve(size)
        cdef unsigned char *cur = self.cur
        cdef unsigned char *nxt = self.nxt
        cdef unsigned char *tmp
        memset(cur, 0, size)
        cur[self.start * width] = 1

        cdef int pos, tid, r, lo, hi, s, counter, alive
        for pos in range(n):
            tid = ids[pos]
            lo = self.offsets[tid]
            hi = self.offsets[tid + 1]
            memset(nxt, 0, size)
            alive = 0
            for r in range(lo, hi):
                s = self.src[r] * width
                if self.cond_plus[r]:
                    # counter <= consumed tokens, so scan 1..pos only
                    for counter in range(1, pos + 1):
                        if cur[s + counter]:
                            nxt[self.dst[r] * width + counter + self.action[r]] = 1
                            alive = 1
                else:
                    if cur[s]:
                        nxt[self.dst[r] * width + self.action[r]] = 1
                        alive = 1
            if not alive:
                return False
            tmp = cur
            cur = nxt
            nxt = tmp
        for s in range(self.n_states):
            if self.finals[s] and cur[s * width]:
                return True
        return False


cdef class NfaKernel:
    cdef int n_states, start
    cdef int[::1] offsets
    cdef int[::1] src
    cdef int[::1] dst
    cdef const unsigned char[::1] finals
    cdef unsigned char *cur
    cdef unsigned char *nxt

    def __cinit__(self, c):
        self.n_states = c.n_states
        self.start = c.start
        self.offsets = c.offsets
        self.src = c.src
        self.dst = c.dst
        self.finals = c.finals
        self.cur = <unsigned char *> malloc(self.n_states)
        self.nxt = <unsigned char *> malloc(self.n_states)
        if self.cur == NULL or self.nxt == NULL:
            raise MemoryError()

    def __dealloc__(self):
        free(self.cur)
        free(self.nxt)

    def accepts(self, int[::1] ids) -> bool:
        cdef int n = ids.shape[0]
        cdef unsigned char *cur = self.cur
        cdef unsigned char *nxt = self.nxt
        cdef unsigned char *tmp
        memset(cur, 0, self.n_states)
        cur[self.start] = 1

        cdef int pos, tid, r, alive, s
        for pos in range(n):
            tid = ids[pos]
            memset(nxt, 0, self.n_states)
            alive = 0
            for r in range(self.offsets[tid], self.offsets[tid + 1]):
                if cur[self.src[r]]:
                    nxt[self.dst[r]] = 1
                    alive = 1
            if not alive:
                return False
            tmp = cur
            cur = nxt
            nxt = tmp
        for s in range(self.n_states):
            if self.finals[s] and cur[s]:
                return True
        return False


def prepare_oca(c):
    return OcaKernel(c)


def prepare_nfa(c):
    return NfaKernel(c)


def oca_accepts_ids(kernel, ids) -> bool:
    return (<OcaKernel> kernel).accepts(ids)


def nfa_accepts_ids(kernel, ids) -> bool:
    return (<NfaKernel> kernel).accepts(ids)
