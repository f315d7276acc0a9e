"""Pure Python versions of the elimination kernels.

All kernels take a matrix in compressed sparse column form
``(nrows, ncols, indptr, indices, data)`` and treat its columns as the
vectors to eliminate, which leaves the rank unchanged.
"""

from __future__ import annotations

import heapq

BACKEND = "python"

INT_LIMIT = 1 << 62


def _weights(nrows, indices):
    w = [0] * nrows
    for i in indices:
        w[int(i)] += 1
    return w


def _order(ncols, indptr):
    return sorted(range(ncols), key=lambda j: (int(indptr[j + 1]) - int(indptr[j]), j))


def rank_mod_p(nrows: int, ncols: int, indptr, indices, data, p: int) -> int:
    """Rank over ``F_p`` of a matrix with entries already reduced mod ``p``."""
    weight = _weights(nrows, indices)
    pivot_of = {}  # coordinate -> pivot id
    pivots = []  # id -> (coordinate, {coord: value}) with value 1 at coordinate
    for j in _order(ncols, indptr):
        vec = {}
        for t in range(int(indptr[j]), int(indptr[j + 1])):
            x = int(data[t]) % p
            if x:
                vec[int(indices[t])] = x
        heap = [pivot_of[c] for c in vec if c in pivot_of]
        heapq.heapify(heap)
        queued = set(heap)
        while heap:
            pid = heapq.heappop(heap)
            c, prow = pivots[pid]
            x = vec.get(c)
            if not x:
                continue
            for cc, y in prow.items():
                v = (vec.get(cc, 0) - x * y) % p
                if v:
                    vec[cc] = v
                    q = pivot_of.get(cc)
                    if q is not None and q not in queued:
                        queued.add(q)
                        heapq.heappush(heap, q)
                else:
                    vec.pop(cc, None)
        if not vec:
            continue
        c = min(vec, key=lambda k: (weight[k], k))
        inv = pow(vec[c], -1, p)
        prow = {k: v * inv % p for k, v in vec.items()}
        pivot_of[c] = len(pivots)
        pivots.append((c, prow))
    return len(pivots)


def unit_pivot_reduce(nrows: int, ncols: int, indptr, indices, data):
    """Right-looking integer elimination using only pivots equal to +1 or -1.

    The next pivot column is a shortest remaining column holding a unit, and
    within it the unit whose row is shortest.  Returns ``(k, rest)``: ``k``
    unit pivots and the remaining nonzero columns (dicts), which vanish on
    every pivot row.  The Smith form of the matrix is ``1`` repeated ``k``
    times followed by the Smith form of ``rest``.
    """
    cols = []
    rows = [set() for _ in range(nrows)]
    for j in range(ncols):
        col = {}
        for t in range(int(indptr[j]), int(indptr[j + 1])):
            x = int(data[t])
            if x:
                i = int(indices[t])
                col[i] = col.get(i, 0) + x
        col = {i: x for i, x in col.items() if x}
        for i in col:
            rows[i].add(j)
        cols.append(col)
    heap = [(len(c), j) for j, c in enumerate(cols) if c]
    heapq.heapify(heap)
    done = [False] * ncols
    k = 0
    while heap:
        n, j = heapq.heappop(heap)
        col = cols[j]
        if done[j] or n != len(col) or not col:
            continue
        units = [i for i, x in col.items() if x == 1 or x == -1]
        if not units:
            continue  # revisited if a later pivot changes it
        i = min(units, key=lambda r: (len(rows[r]), r))
        u = col[i]
        for j2 in sorted(rows[i]):
            if j2 == j:
                continue
            c2 = cols[j2]
            f = c2[i] * u
            for i2, y in col.items():
                v = c2.get(i2, 0) - f * y
                if v:
                    if i2 not in c2:
                        rows[i2].add(j2)
                    c2[i2] = v
                else:
                    del c2[i2]
                    rows[i2].discard(j2)
            heapq.heappush(heap, (len(c2), j2))
        for i2 in col:
            rows[i2].discard(j)
        cols[j] = {}
        done[j] = True
        k += 1
    rest = [c for j, c in enumerate(cols) if c and not done[j]]
    return k, rest


def product_is_zero_mod_p(a_shape, a_indptr, a_indices, a_data, b_shape, b_indptr, b_indices, b_data, p: int) -> bool:
    """Whether ``A @ B`` vanishes mod ``p`` (both in compressed column form)."""
    if a_shape[1] != b_shape[0]:
        raise ValueError("shape mismatch")
    for j in range(b_shape[1]):
        acc = {}
        for t in range(int(b_indptr[j]), int(b_indptr[j + 1])):
            k = int(b_indices[t])
            y = int(b_data[t])
            for s in range(int(a_indptr[k]), int(a_indptr[k + 1])):
                i = int(a_indices[s])
                acc[i] = (acc.get(i, 0) + int(a_data[s]) * y) % p
        if any(acc.values()):
            return False
    return True
