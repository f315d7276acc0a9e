# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled elimination kernels; same interface as ``_pykernels``."""

from libc.stdlib cimport malloc, realloc, free, calloc
from libc.stdint cimport int64_t, int32_t

import numpy as np

BACKEND = "cython"

cdef int64_t INT_LIMIT = (<int64_t>1) << 62
cdef int64_t FACTOR_LIMIT = (<int64_t>1) << 30


cdef struct Pool:
    int32_t *idx
    int64_t *val
    int64_t size
    int64_t cap


cdef int pool_reserve(Pool *pl, int64_t extra) except -1:
    cdef int64_t need = pl.size + extra
    cdef int64_t cap = pl.cap
    if need <= cap:
        return 0
    if cap < 1024:
        cap = 1024
    while cap < need:
        cap = cap * 2
    cdef int32_t *ni = <int32_t *> realloc(pl.idx, cap * sizeof(int32_t))
    if ni == NULL:
        raise MemoryError()
    pl.idx = ni
    cdef int64_t *nv = <int64_t *> realloc(pl.val, cap * sizeof(int64_t))
    if nv == NULL:
        raise MemoryError()
    pl.val = nv
    pl.cap = cap
    return 0


cdef struct Heap:
    int32_t *data
    int64_t size


cdef inline void heap_push(Heap *h, int32_t x) nogil:
    cdef int64_t i = h.size
    cdef int64_t parent
    h.size += 1
    while i > 0:
        parent = (i - 1) >> 1
        if h.data[parent] <= x:
            break
        h.data[i] = h.data[parent]
        i = parent
    h.data[i] = x


cdef inline int32_t heap_pop(Heap *h) nogil:
    cdef int32_t top = h.data[0]
    cdef int32_t last
    cdef int64_t i = 0
    cdef int64_t child
    h.size -= 1
    if h.size == 0:
        return top
    last = h.data[h.size]
    while True:
        child = 2 * i + 1
        if child >= h.size:
            break
        if child + 1 < h.size and h.data[child + 1] < h.data[child]:
            child += 1
        if h.data[child] >= last:
            break
        h.data[i] = h.data[child]
        i = child
    h.data[i] = last
    return top


cdef int64_t modinv(int64_t a, int64_t p):
    cdef int64_t t = 0, newt = 1, r = p, newr = a % p, qq, tmp
    while newr != 0:
        qq = r // newr
        tmp = t - qq * newt
        t = newt
        newt = tmp
        tmp = r - qq * newr
        r = newr
        newr = tmp
    if t < 0:
        t += p
    return t


cdef class _Eliminator:
    """Left-looking sparse elimination; pivots are applied in creation order."""

    cdef int64_t nrows
    cdef int64_t p            # 0 means exact integer arithmetic
    cdef Pool pool
    cdef int64_t *piv_start
    cdef int64_t *piv_len
    cdef int32_t *piv_coord
    cdef int32_t *pivot_of
    cdef int64_t npiv
    cdef int64_t *acc
    cdef char *touched_flag
    cdef char *queued
    cdef int32_t *touched
    cdef int64_t ntouched
    cdef Heap heap
    cdef int64_t *weight

    def __cinit__(self, int64_t nrows, int64_t p, int64_t maxpiv):
        self.nrows = nrows
        self.p = p
        self.pool.idx = NULL
        self.pool.val = NULL
        self.pool.size = 0
        self.pool.cap = 0
        cdef int64_t n = nrows if nrows > 0 else 1
        cdef int64_t m = maxpiv if maxpiv > 0 else 1
        self.piv_start = <int64_t *> malloc(m * sizeof(int64_t))
        self.piv_len = <int64_t *> malloc(m * sizeof(int64_t))
        self.piv_coord = <int32_t *> malloc(m * sizeof(int32_t))
        self.pivot_of = <int32_t *> malloc(n * sizeof(int32_t))
        self.acc = <int64_t *> calloc(n, sizeof(int64_t))
        self.touched_flag = <char *> calloc(n, sizeof(char))
        self.queued = <char *> calloc(n, sizeof(char))
        self.touched = <int32_t *> malloc(n * sizeof(int32_t))
        self.heap.data = <int32_t *> malloc(n * sizeof(int32_t))
        self.heap.size = 0
        self.weight = <int64_t *> calloc(n, sizeof(int64_t))
        if (self.piv_start == NULL or self.piv_len == NULL or self.piv_coord == NULL
                or self.pivot_of == NULL or self.acc == NULL or self.touched_flag == NULL
                or self.queued == NULL or self.touched == NULL or self.heap.data == NULL
                or self.weight == NULL):
            raise MemoryError()
        cdef int64_t i
        for i in range(n):
            self.pivot_of[i] = -1
        self.npiv = 0
        self.ntouched = 0

    def __dealloc__(self):
        free(self.pool.idx)
        free(self.pool.val)
        free(self.piv_start)
        free(self.piv_len)
        free(self.piv_coord)
        free(self.pivot_of)
        free(self.acc)
        free(self.touched_flag)
        free(self.queued)
        free(self.touched)
        free(self.heap.data)
        free(self.weight)

    cdef inline void touch(self, int32_t c):
        if not self.touched_flag[c]:
            self.touched_flag[c] = 1
            self.touched[self.ntouched] = c
            self.ntouched += 1
        if self.acc[c] != 0 and self.pivot_of[c] >= 0 and not self.queued[c]:
            self.queued[c] = 1
            heap_push(&self.heap, self.pivot_of[c])

    cdef int load(self, const int32_t[:] idx, const int64_t[:] val, int64_t lo, int64_t hi) except -1:
        cdef int64_t t
        cdef int32_t c
        cdef int64_t x
        for t in range(lo, hi):
            c = idx[t]
            x = val[t]
            if self.p:
                x = x % self.p
                if x < 0:
                    x += self.p
            self.acc[c] += x
            if self.p:
                self.acc[c] %= self.p
            self.touch(c)
        return 0

    cdef int reduce(self) except -1:
        cdef int32_t pid, c, cc
        cdef int64_t x, y, v, t, start, end
        cdef int64_t p = self.p
        while self.heap.size > 0:
            pid = heap_pop(&self.heap)
            c = self.piv_coord[pid]
            x = self.acc[c]
            if x == 0:
                continue
            start = self.piv_start[pid]
            end = start + self.piv_len[pid]
            for t in range(start, end):
                cc = self.pool.idx[t]
                y = self.pool.val[t]
                if p:
                    v = (self.acc[cc] - x * y) % p
                    if v < 0:
                        v += p
                else:
                    if x > FACTOR_LIMIT or x < -FACTOR_LIMIT or y > FACTOR_LIMIT or y < -FACTOR_LIMIT:
                        raise OverflowError("integer elimination left the int64 range")
                    v = self.acc[cc] - x * y
                    if v > INT_LIMIT or v < -INT_LIMIT:
                        raise OverflowError("integer elimination left the int64 range")
                self.acc[cc] = v
                self.touch(cc)
        return 0

    cdef void clear(self):
        cdef int64_t k
        cdef int32_t c
        for k in range(self.ntouched):
            c = self.touched[k]
            self.acc[c] = 0
            self.touched_flag[c] = 0
            self.queued[c] = 0
        self.ntouched = 0

    cdef int store_pivot(self, int32_t c) except -1:
        # assumes acc[c] is invertible; normalizes to 1 at c
        cdef int64_t k, count = 0, x, inv = 1, sgn = 1
        cdef int32_t cc
        cdef int64_t p = self.p
        for k in range(self.ntouched):
            if self.acc[self.touched[k]] != 0:
                count += 1
        pool_reserve(&self.pool, count)
        if p:
            inv = modinv(self.acc[c], p)
        else:
            sgn = 1 if self.acc[c] == 1 else -1
        self.piv_start[self.npiv] = self.pool.size
        self.piv_len[self.npiv] = count
        self.piv_coord[self.npiv] = c
        for k in range(self.ntouched):
            cc = self.touched[k]
            x = self.acc[cc]
            if x != 0:
                self.pool.idx[self.pool.size] = cc
                self.pool.val[self.pool.size] = (x * inv) % p if p else x * sgn
                self.pool.size += 1
        self.pivot_of[c] = <int32_t> self.npiv
        self.npiv += 1
        return 0

    cdef int32_t choose(self, bint units_only):
        cdef int64_t k, best_w = -1
        cdef int32_t c, best = -1
        cdef int64_t x
        for k in range(self.ntouched):
            c = self.touched[k]
            x = self.acc[c]
            if x == 0:
                continue
            if units_only and x != 1 and x != -1:
                continue
            if best < 0 or self.weight[c] < best_w or (self.weight[c] == best_w and c < best):
                best = c
                best_w = self.weight[c]
        return best

    cdef dict snapshot(self):
        cdef int64_t k
        cdef int32_t c
        out = {}
        for k in range(self.ntouched):
            c = self.touched[k]
            if self.acc[c] != 0:
                out[int(c)] = int(self.acc[c])
        return out


def _prepare(int64_t nrows, int64_t ncols, indptr, indices, data):
    ip = np.ascontiguousarray(indptr, dtype=np.int64)
    ix = np.ascontiguousarray(indices, dtype=np.int32)
    dv = np.ascontiguousarray(data, dtype=np.int64)
    lengths = np.diff(ip)
    order = np.lexsort((np.arange(ncols), lengths)).astype(np.int64)
    weight = np.bincount(ix, minlength=nrows).astype(np.int64) if nrows > 0 else np.zeros(1, np.int64)
    return ip, ix, dv, order, weight


def rank_mod_p(int64_t nrows, int64_t ncols, indptr, indices, data, int64_t p):
    """Rank over ``F_p``; ``p`` must be below ``2**31``."""
    if p <= 1 or p >= (1 << 31):
        raise ValueError("modulus out of range")
    ip, ix, dv, order, weight = _prepare(nrows, ncols, indptr, indices, data)
    cdef const int64_t[:] ipv = ip
    cdef const int32_t[:] ixv = ix
    cdef const int64_t[:] dvv = dv
    cdef const int64_t[:] ordv = order
    cdef const int64_t[:] wv = weight
    maxpiv = min(nrows, ncols)
    cdef _Eliminator el = _Eliminator(nrows, p, maxpiv)
    cdef int64_t k, j
    cdef int32_t c
    for k in range(nrows):
        el.weight[k] = wv[k]
    for k in range(ncols):
        j = ordv[k]
        el.load(ixv, dvv, ipv[j], ipv[j + 1])
        el.reduce()
        c = el.choose(False)
        if c >= 0:
            el.store_pivot(c)
        el.clear()
    return int(el.npiv)


cdef struct Col:
    int32_t *idx
    int64_t *val
    int32_t len
    int32_t cap


cdef struct IntList:
    int32_t *data
    int32_t len
    int32_t cap


cdef int col_push(Col *c, int32_t i, int64_t x) except -1:
    cdef int32_t cap
    cdef int32_t *ni
    cdef int64_t *nv
    if c.len == c.cap:
        cap = c.cap * 2 if c.cap else 4
        ni = <int32_t *> realloc(c.idx, cap * sizeof(int32_t))
        if ni == NULL:
            raise MemoryError()
        c.idx = ni
        nv = <int64_t *> realloc(c.val, cap * sizeof(int64_t))
        if nv == NULL:
            raise MemoryError()
        c.val = nv
        c.cap = cap
    c.idx[c.len] = i
    c.val[c.len] = x
    c.len += 1
    return 0


cdef int list_push(IntList *l, int32_t x) except -1:
    cdef int32_t cap
    cdef int32_t *nd
    if l.len == l.cap:
        cap = l.cap * 2 if l.cap else 4
        nd = <int32_t *> realloc(l.data, cap * sizeof(int32_t))
        if nd == NULL:
            raise MemoryError()
        l.data = nd
        l.cap = cap
    l.data[l.len] = x
    l.len += 1
    return 0


cdef struct KeyHeap:
    int64_t *data
    int64_t size
    int64_t cap


cdef int kheap_push(KeyHeap *h, int64_t x) except -1:
    cdef int64_t i, parent, cap
    cdef int64_t *nd
    if h.size == h.cap:
        cap = h.cap * 2 if h.cap else 1024
        nd = <int64_t *> realloc(h.data, cap * sizeof(int64_t))
        if nd == NULL:
            raise MemoryError()
        h.data = nd
        h.cap = cap
    i = h.size
    h.size += 1
    while i > 0:
        parent = (i - 1) >> 1
        if h.data[parent] <= x:
            break
        h.data[i] = h.data[parent]
        i = parent
    h.data[i] = x
    return 0


cdef int64_t kheap_pop(KeyHeap *h) nogil:
    cdef int64_t top = h.data[0]
    cdef int64_t last, i = 0, child
    h.size -= 1
    if h.size == 0:
        return top
    last = h.data[h.size]
    while True:
        child = 2 * i + 1
        if child >= h.size:
            break
        if child + 1 < h.size and h.data[child + 1] < h.data[child]:
            child += 1
        if h.data[child] >= last:
            break
        h.data[i] = h.data[child]
        i = child
    h.data[i] = last
    return top


cdef class _UnitEliminator:
    """Right-looking integer elimination on unit pivots (see ``unit_pivot_reduce``)."""

    cdef int64_t nrows, ncols
    cdef Col *cols
    cdef IntList *rows
    cdef int32_t *rowcount
    cdef char *done
    cdef int64_t *pv          # dense copy of the pivot column
    cdef int64_t *mark        # stamp per row
    cdef int64_t *cstamp      # stamp per column
    cdef int64_t stamp
    cdef KeyHeap heap

    def __cinit__(self, int64_t nrows, int64_t ncols):
        self.nrows = nrows
        self.ncols = ncols
        cdef int64_t n = nrows if nrows > 0 else 1
        cdef int64_t m = ncols if ncols > 0 else 1
        self.cols = <Col *> calloc(m, sizeof(Col))
        self.rows = <IntList *> calloc(n, sizeof(IntList))
        self.rowcount = <int32_t *> calloc(n, sizeof(int32_t))
        self.done = <char *> calloc(m, sizeof(char))
        self.pv = <int64_t *> calloc(n, sizeof(int64_t))
        self.mark = <int64_t *> calloc(n, sizeof(int64_t))
        self.cstamp = <int64_t *> calloc(m, sizeof(int64_t))
        self.heap.data = NULL
        self.heap.size = 0
        self.heap.cap = 0
        self.stamp = 0
        if (self.cols == NULL or self.rows == NULL or self.rowcount == NULL or self.done == NULL
                or self.pv == NULL or self.mark == NULL or self.cstamp == NULL):
            raise MemoryError()

    def __dealloc__(self):
        cdef int64_t k
        if self.cols != NULL:
            for k in range(self.ncols):
                free(self.cols[k].idx)
                free(self.cols[k].val)
            free(self.cols)
        if self.rows != NULL:
            for k in range(self.nrows):
                free(self.rows[k].data)
            free(self.rows)
        free(self.rowcount)
        free(self.done)
        free(self.pv)
        free(self.mark)
        free(self.cstamp)
        free(self.heap.data)

    cdef int load(self, const int64_t[:] ip, const int32_t[:] ix, const int64_t[:] dv) except -1:
        cdef int64_t j, t
        cdef int32_t i, k
        cdef Col *c
        for j in range(self.ncols):
            c = &self.cols[j]
            self.stamp += 1
            for t in range(ip[j], ip[j + 1]):
                i = ix[t]
                if dv[t] == 0:
                    continue
                if self.mark[i] == self.stamp:
                    # repeated coordinate: add into the existing entry
                    for k in range(c.len):
                        if c.idx[k] == i:
                            c.val[k] += dv[t]
                    continue
                self.mark[i] = self.stamp
                col_push(c, i, dv[t])
            k = 0
            while k < c.len:
                if c.val[k] == 0:
                    c.len -= 1
                    c.idx[k] = c.idx[c.len]
                    c.val[k] = c.val[c.len]
                else:
                    k += 1
            for k in range(c.len):
                list_push(&self.rows[c.idx[k]], <int32_t> j)
                self.rowcount[c.idx[k]] += 1
            if c.len:
                kheap_push(&self.heap, <int64_t> c.len * (self.ncols + 1) + j)
        return 0

    cdef int update(self, int32_t j2, int32_t prow, Col *pc) except -1:
        # column j2 -= f * pivot column, f chosen to clear row prow
        cdef Col *c = &self.cols[j2]
        cdef int32_t k, i
        cdef int64_t f = 0, x, v, y
        for k in range(c.len):
            if c.idx[k] == prow:
                f = c.val[k] * self.pv[prow]
                break
        if f == 0:
            return 0  # stale row entry
        if f > FACTOR_LIMIT or f < -FACTOR_LIMIT:
            raise OverflowError("integer elimination left the int64 range")
        self.stamp += 1
        k = 0
        while k < c.len:
            i = c.idx[k]
            self.mark[i] = self.stamp
            y = self.pv[i]
            if y != 0:
                v = c.val[k] - f * y
                if v > INT_LIMIT or v < -INT_LIMIT:
                    raise OverflowError("integer elimination left the int64 range")
                if v == 0:
                    self.rowcount[i] -= 1
                    c.len -= 1
                    c.idx[k] = c.idx[c.len]
                    c.val[k] = c.val[c.len]
                    continue
                c.val[k] = v
            k += 1
        for k in range(pc.len):
            i = pc.idx[k]
            if self.mark[i] != self.stamp:
                y = pc.val[k]
                if y > FACTOR_LIMIT or y < -FACTOR_LIMIT:
                    raise OverflowError("integer elimination left the int64 range")
                col_push(c, i, -f * y)
                list_push(&self.rows[i], j2)
                self.rowcount[i] += 1
        kheap_push(&self.heap, <int64_t> c.len * (self.ncols + 1) + j2)
        return 0

    cdef int64_t run(self) except -1:
        cdef int64_t key, npiv = 0, n1 = self.ncols + 1
        cdef int32_t j, k, i, best, j2
        cdef int64_t best_w
        cdef Col *pc
        cdef IntList *rl
        while self.heap.size > 0:
            key = kheap_pop(&self.heap)
            j = <int32_t> (key % n1)
            pc = &self.cols[j]
            if self.done[j] or pc.len == 0 or key // n1 != pc.len:
                continue
            best = -1
            best_w = 0
            for k in range(pc.len):
                if pc.val[k] == 1 or pc.val[k] == -1:
                    i = pc.idx[k]
                    if best < 0 or self.rowcount[i] < best_w or (self.rowcount[i] == best_w and i < best):
                        best = i
                        best_w = self.rowcount[i]
            if best < 0:
                continue
            for k in range(pc.len):
                self.pv[pc.idx[k]] = pc.val[k]
            rl = &self.rows[best]
            self.stamp += 1
            for k in range(rl.len):
                j2 = rl.data[k]
                if j2 == j or self.done[j2] or self.cstamp[j2] == self.stamp:
                    continue
                self.cstamp[j2] = self.stamp
                self.update(j2, best, pc)
            for k in range(pc.len):
                self.pv[pc.idx[k]] = 0
                self.rowcount[pc.idx[k]] -= 1
            self.done[j] = 1
            pc.len = 0
            rl.len = 0
            npiv += 1
        return npiv

    def rest(self):
        out = []
        cdef int64_t j
        cdef int32_t k
        cdef Col *c
        for j in range(self.ncols):
            c = &self.cols[j]
            if not self.done[j] and c.len:
                out.append({int(c.idx[k]): int(c.val[k]) for k in range(c.len)})
        return out


def unit_pivot_reduce(int64_t nrows, int64_t ncols, indptr, indices, data):
    """Integer elimination with pivots +1/-1 only; see the Python version."""
    cdef const int64_t[:] ipv = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const int32_t[:] ixv = np.ascontiguousarray(indices, dtype=np.int32)
    cdef const int64_t[:] dvv = np.ascontiguousarray(data, dtype=np.int64)
    cdef _UnitEliminator el = _UnitEliminator(nrows, ncols)
    el.load(ipv, ixv, dvv)
    k = el.run()
    return int(k), el.rest()


def product_is_zero_mod_p(a_shape, a_indptr, a_indices, a_data, b_shape, b_indptr, b_indices, b_data, int64_t p):
    if a_shape[1] != b_shape[0]:
        raise ValueError("shape mismatch")
    cdef int64_t nrows = a_shape[0]
    cdef int64_t ncols = b_shape[1]
    cdef const int64_t[:] aip = np.ascontiguousarray(a_indptr, dtype=np.int64)
    cdef const int32_t[:] aix = np.ascontiguousarray(a_indices, dtype=np.int32)
    cdef const int64_t[:] adv = np.ascontiguousarray(a_data, dtype=np.int64)
    cdef const int64_t[:] bip = np.ascontiguousarray(b_indptr, dtype=np.int64)
    cdef const int32_t[:] bix = np.ascontiguousarray(b_indices, dtype=np.int32)
    cdef const int64_t[:] bdv = np.ascontiguousarray(b_data, dtype=np.int64)
    cdef int64_t *acc = <int64_t *> calloc(nrows if nrows > 0 else 1, sizeof(int64_t))
    cdef int32_t *touched = <int32_t *> malloc((nrows if nrows > 0 else 1) * sizeof(int32_t))
    cdef char *flag = <char *> calloc(nrows if nrows > 0 else 1, sizeof(char))
    if acc == NULL or touched == NULL or flag == NULL:
        free(acc); free(touched); free(flag)
        raise MemoryError()
    cdef int64_t j, t, s, k, y, nt
    cdef int32_t i
    cdef bint zero = True
    try:
        for j in range(ncols):
            nt = 0
            for t in range(bip[j], bip[j + 1]):
                k = bix[t]
                y = bdv[t] % p
                for s in range(aip[k], aip[k + 1]):
                    i = aix[s]
                    acc[i] = (acc[i] + (adv[s] % p) * y) % p
                    if not flag[i]:
                        flag[i] = 1
                        touched[nt] = i
                        nt += 1
            for t in range(nt):
                i = touched[t]
                if acc[i] % p != 0:
                    zero = False
                acc[i] = 0
                flag[i] = 0
            if not zero:
                break
    finally:
        free(acc)
        free(touched)
        free(flag)
    return zero
