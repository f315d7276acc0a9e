"""Index combinatorics: compositions, permutations, cosets and tableaux.

Conventions used throughout the package
---------------------------------------
* A permutation of ``{1..r}`` is stored as a tuple of **0-based** images in
  one-line notation, so ``w[k]`` is the image of ``k + 1`` minus one.  The
  helpers :func:`format_perm` / :func:`parse_perm` convert to the usual
  1-based notation.
* Products compose right to left: ``perm_mul(u, v)[k] == u[v[k]]``.  With
  this choice ``perm_mul(w, s_i)`` swaps the entries in positions ``i`` and
  ``i + 1`` of ``w``, and ``l(w s_i) > l(w)`` iff ``w(i) < w(i+1)``.
* Multi-indices are tuples of 1-based letters.  Permutations act on them from
  the right by ``(i . w)_k = i_{w(k)}``; this is a right action for the
  product above.
* The coset ``S_lam d`` is recorded by the multi-index ``i_lam . d``, and the
  double coset ``S_lam d S_mu`` by the matrix ``wt(i_lam . d, i_mu)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

Perm = tuple  # tuple[int, ...], 0-based images
MultiIndex = tuple  # tuple[int, ...], letters 1..n
Tableau = tuple  # tuple of rows, each a tuple of entries


class Composition(tuple):
    """Weak composition of ``r`` into ``n`` parts, stored with all its zeros."""

    def __new__(cls, parts: Iterable[int] = ()):
        parts = tuple(int(p) for p in parts)
        if any(p < 0 for p in parts):
            raise ValueError(f"negative part in composition {parts}")
        return super().__new__(cls, parts)

    @property
    def n(self) -> int:
        return len(self)

    @property
    def r(self) -> int:
        return sum(self)

    def is_partition(self) -> bool:
        return all(a >= b for a, b in zip(self, self[1:]))

    def __repr__(self):
        return f"Composition({tuple(self)})"

    def __str__(self):
        return ",".join(map(str, self))


def parse_composition(text: str) -> Composition:
    return Composition(int(p) for p in text.split(",") if p.strip() != "")


# ---------------------------------------------------------------------------
# compositions and dominance


@lru_cache(maxsize=None)
def compositions(n: int, r: int) -> tuple[Composition, ...]:
    """All of Lambda(n, r) in reverse-lexicographic order."""
    if n < 1 or r < 0:
        raise ValueError("need n >= 1 and r >= 0")

    def rec(k, rest):
        if k == 1:
            yield (rest,)
            return
        for a in range(rest, -1, -1):
            for tail in rec(k - 1, rest - a):
                yield (a,) + tail

    return tuple(Composition(c) for c in rec(n, r))


@lru_cache(maxsize=None)
def partitions(n: int, r: int) -> tuple[Composition, ...]:
    return tuple(c for c in compositions(n, r) if c.is_partition())


def dominates(lam: Sequence[int], mu: Sequence[int], strict: bool = False) -> bool:
    """``lam`` dominates ``mu``: every prefix sum of lam is >= that of mu."""
    if len(lam) != len(mu) or sum(lam) != sum(mu):
        raise ValueError(f"cannot compare {tuple(lam)} and {tuple(mu)}")
    a = b = 0
    for x, y in zip(lam, mu):
        a += x
        b += y
        if a < b:
            return False
    return not (strict and tuple(lam) == tuple(mu))


def conjugate(lam: Sequence[int]) -> Composition:
    lam = Composition(lam)
    if not lam.is_partition():
        raise ValueError(f"{tuple(lam)} is not a partition")
    first = lam[0] if lam else 0
    return Composition(sum(1 for x in lam if x >= j) for j in range(1, first + 1))


def dominance_chains(pool: Sequence[Composition], lam: Sequence[int], k: int) -> list[tuple]:
    """Chains ``mu1 > mu2 > ... > muk > lam`` (strict dominance), ``mu_i`` in ``pool``.

    Each chain is returned as the tuple ``(mu1, ..., muk)``; the order follows
    the order of ``pool`` lexicographically.
    """
    return all_dominance_chains(pool, lam).get(k, [])


def all_dominance_chains(pool: Sequence[Composition], lam: Sequence[int]) -> dict[int, list[tuple]]:
    """``dominance_chains`` for every length at once (length 0 gives ``[()]``)."""
    lam = Composition(lam)
    above = [Composition(m) for m in pool if dominates(m, lam, strict=True)]
    below = {m: [x for x in above if dominates(m, x, strict=True)] for m in above}
    out: dict[int, list[tuple]] = {0: [()]}

    def extend(chain):
        out.setdefault(len(chain), []).append(chain)
        for m in below[chain[-1]]:
            extend(chain + (m,))

    for m in above:
        extend((m,))
    # depth-first in pool order lists each length lexicographically
    return out


# ---------------------------------------------------------------------------
# permutations


def identity(r: int) -> Perm:
    return tuple(range(r))


def simple_reflection(i: int, r: int) -> Perm:
    """``s_i = (i, i+1)`` with 1-based ``i``."""
    if not 1 <= i < r:
        raise ValueError(f"no simple reflection s_{i} in S_{r}")
    w = list(range(r))
    w[i - 1], w[i] = w[i], w[i - 1]
    return tuple(w)


def perm_mul(u: Perm, v: Perm) -> Perm:
    if len(u) != len(v):
        raise ValueError("permutations of different degrees")
    return tuple(u[x] for x in v)


def perm_inverse(w: Perm) -> Perm:
    inv = [0] * len(w)
    for k, x in enumerate(w):
        inv[x] = k
    return tuple(inv)


def perm_length(w: Perm) -> int:
    r = len(w)
    return sum(1 for a in range(r) for b in range(a + 1, r) if w[a] > w[b])


permutation_product = perm_mul
permutation_length = perm_length


def is_permutation(w: Sequence[int]) -> bool:
    return sorted(w) == list(range(len(w)))


def reduced_word(w: Perm) -> list[int]:
    """1-based ``[i1, ..., ik]`` with ``w = s_i1 ... s_ik`` and ``k = l(w)``."""
    w = list(w)
    word = []
    # strip right descents: w = (w s_i) s_i
    while True:
        for i in range(len(w) - 1):
            if w[i] > w[i + 1]:
                w[i], w[i + 1] = w[i + 1], w[i]
                word.append(i + 1)
                break
        else:
            break
    return word[::-1]


def perm_sort_key(w: Perm):
    return (perm_length(w), w)


@lru_cache(maxsize=None)
def all_permutations(r: int) -> tuple[Perm, ...]:
    """``S_r`` ordered by length, then lexicographically."""
    return tuple(sorted(itertools.permutations(range(r)), key=perm_sort_key))


def format_perm(w: Perm) -> str:
    """1-based one-line notation, e.g. ``"2 1 3"``."""
    return " ".join(str(x + 1) for x in w)


def parse_perm(text: str) -> Perm:
    w = tuple(int(x) - 1 for x in text.split())
    if not is_permutation(w):
        raise ValueError(f"not a permutation: {text!r}")
    return w


# ---------------------------------------------------------------------------
# Young subgroups and cosets


def blocks(lam: Sequence[int]) -> list[range]:
    out, start = [], 0
    for part in lam:
        out.append(range(start, start + part))
        start += part
    return out


def canonical_multi_index(lam: Sequence[int]) -> MultiIndex:
    """``i_lam = (1^lam_1, 2^lam_2, ...)``."""
    return tuple(s + 1 for s, part in enumerate(lam) for _ in range(part))


def act(i: MultiIndex, w: Perm) -> MultiIndex:
    """Right action ``(i . w)_k = i_{w(k)}``."""
    return tuple(i[x] for x in w)


def wt(i: MultiIndex, n: int) -> Composition:
    counts = [0] * n
    for x in i:
        counts[x - 1] += 1
    return Composition(counts)


def young_subgroup(lam: Sequence[int]) -> list[Perm]:
    r = sum(lam)
    factors = [list(itertools.permutations(b)) for b in blocks(lam)]
    out = []
    for choice in itertools.product(*factors):
        w = [0] * r
        for block, images in zip(blocks(lam), choice):
            for k, x in zip(block, images):
                w[k] = x
        out.append(tuple(w))
    return sorted(out, key=perm_sort_key)


def min_rep_of_multi_index(j: MultiIndex, lam: Sequence[int]) -> Perm:
    """The shortest ``d`` with ``i_lam . d == j``."""
    nxt = [b.start for b in blocks(lam)]
    d = []
    for letter in j:
        d.append(nxt[letter - 1])
        nxt[letter - 1] += 1
    return tuple(d)


def is_left_reduced(d: Perm, lam: Sequence[int]) -> bool:
    """``d`` is the shortest element of ``S_lam d``."""
    dinv = perm_inverse(d)
    return all(dinv[k] < dinv[k + 1] for b in blocks(lam) for k in b[:-1])


def is_right_reduced(d: Perm, mu: Sequence[int]) -> bool:
    """``d`` is the shortest element of ``d S_mu``."""
    return all(d[k] < d[k + 1] for b in blocks(mu) for k in b[:-1])


@lru_cache(maxsize=None)
def multi_indices(lam: tuple) -> tuple[MultiIndex, ...]:
    """Distinct rearrangements of ``i_lam``, ordered like their coset reps."""
    base = canonical_multi_index(lam)
    found = set(itertools.permutations(base))
    return tuple(sorted(found, key=lambda j: perm_sort_key(min_rep_of_multi_index(j, lam))))


@lru_cache(maxsize=None)
def min_coset_reps(lam: tuple) -> tuple[Perm, ...]:
    """``D_lam``: shortest representatives of the right cosets ``S_lam w``."""
    return tuple(min_rep_of_multi_index(j, lam) for j in multi_indices(tuple(lam)))


def omega_of_multi_index(j: MultiIndex, mu: Sequence[int], n: int) -> tuple:
    """``wt(j, i_mu)`` as an ``n x n`` tuple of tuples."""
    om = [[0] * n for _ in range(n)]
    for t, b in enumerate(blocks(mu)):
        for k in b:
            om[j[k] - 1][t] += 1
    return tuple(tuple(row) for row in om)


def contingency_tables(rows: Sequence[int], cols: Sequence[int], upper: bool = False) -> list[tuple]:
    """Non-negative integer matrices with the given margins.

    With ``upper`` only matrices vanishing strictly below the diagonal are
    produced.
    """
    n, m = len(rows), len(cols)
    out = []
    table = [[0] * m for _ in range(n)]

    def fill_col(t, rem):
        if t == m:
            if not any(rem):
                out.append(tuple(tuple(row) for row in table))
            return
        top = min(t, n - 1) if upper else n - 1

        def fill_cell(s, left, rem):
            if s == top:
                if left <= rem[s]:
                    table[s][t] = left
                    rem2 = list(rem)
                    rem2[s] -= left
                    fill_col(t + 1, rem2)
                    table[s][t] = 0
                return
            for v in range(min(left, rem[s]), -1, -1):
                table[s][t] = v
                rem2 = list(rem)
                rem2[s] -= v
                fill_cell(s + 1, left - v, rem2)
            table[s][t] = 0

        if cols[t] == 0:
            fill_col(t + 1, rem)
        elif top < 0:
            return
        else:
            fill_cell(0, cols[t], list(rem))

    fill_col(0, list(rows))
    return out


def multi_index_of_omega(om: tuple, mu: Sequence[int]) -> MultiIndex:
    """The multi-index that is increasing on every ``mu``-block with ``wt(j, i_mu) = om``."""
    j = []
    for t, part in enumerate(mu):
        col = []
        for s in range(len(om)):
            col.extend([s + 1] * om[s][t])
        if len(col) != part:
            raise ValueError("column sums do not match mu")
        j.extend(col)
    return tuple(j)


@lru_cache(maxsize=None)
def _double_coset_table(lam: tuple, mu: tuple) -> tuple:
    reps = []
    for om in contingency_tables(lam, mu):
        j = multi_index_of_omega(om, mu)
        reps.append((min_rep_of_multi_index(j, lam), om))
    reps.sort(key=lambda pair: perm_sort_key(pair[0]))
    return tuple(reps)


def double_coset_reps(lam: Sequence[int], mu: Sequence[int]) -> tuple[Perm, ...]:
    """``D_{lam mu}``: the shortest element of each double coset ``S_lam \\ S_r / S_mu``."""
    if sum(lam) != sum(mu):
        raise ValueError("compositions of different sizes")
    return tuple(d for d, _ in _double_coset_table(tuple(lam), tuple(mu)))


def is_double_coset_rep(lam: Sequence[int], mu: Sequence[int], d: Perm) -> bool:
    return len(d) == sum(lam) and is_left_reduced(d, lam) and is_right_reduced(d, mu)


# ---------------------------------------------------------------------------
# weight matrices and the filtration levels


@dataclass(frozen=True)
class WeightMatrix:
    omega: tuple

    @property
    def n(self) -> int:
        return len(self.omega)

    @property
    def total(self) -> int:
        return sum(map(sum, self.omega))

    def is_upper_triangular(self) -> bool:
        return all(self.omega[s][t] == 0 for s in range(self.n) for t in range(s))

    @property
    def level(self):
        """``sum (t - s) omega_st`` or ``None`` when some entry below the diagonal is nonzero."""
        if not self.is_upper_triangular():
            return None
        return sum((t - s) * self.omega[s][t] for s in range(self.n) for t in range(s, self.n))


def weight_matrix(i: MultiIndex, j: MultiIndex, n: int | None = None) -> WeightMatrix:
    if len(i) != len(j):
        raise ValueError("multi-indices of different lengths")
    if n is None:
        n = max(max(i, default=0), max(j, default=0))
    om = [[0] * n for _ in range(n)]
    for a, b in zip(i, j):
        om[a - 1][b - 1] += 1
    return WeightMatrix(tuple(tuple(row) for row in om))


def omega_matrix(lam: Sequence[int], mu: Sequence[int], d: Perm) -> tuple:
    return omega_of_multi_index(act(canonical_multi_index(lam), d), mu, len(lam))


def omega_level(lam: Sequence[int], mu: Sequence[int], d: Perm):
    """Level of ``wt(i_lam d, i_mu)``; ``None`` if it is not upper triangular."""
    if not is_double_coset_rep(lam, mu, d):
        raise ValueError(f"{format_perm(d)} is not a distinguished double coset representative")
    return WeightMatrix(omega_matrix(lam, mu, d)).level


def pair_level(lam: Sequence[int], mu: Sequence[int]) -> int:
    """Level shared by every upper-triangular double coset of ``(lam, mu)``."""
    return sum((t + 1) * m for t, m in enumerate(mu)) - sum((s + 1) * x for s, x in enumerate(lam))


@lru_cache(maxsize=None)
def upper_reps(lam: tuple, mu: tuple) -> tuple[Perm, ...]:
    """``Omega^{>=0}_{lam mu}`` in the order of :func:`double_coset_reps`."""
    n = len(lam)
    return tuple(d for d, om in _double_coset_table(lam, mu)
                 if all(om[s][t] == 0 for s in range(n) for t in range(s)))


def omega_reps(lam: Sequence[int], mu: Sequence[int], m: int) -> tuple[Perm, ...]:
    """``Omega^{>=m}_{lam mu}``."""
    reps = upper_reps(tuple(lam), tuple(mu))
    if reps and pair_level(lam, mu) >= m:
        return reps
    return ()


# ---------------------------------------------------------------------------
# tableaux


def row_semistandard_tableaux(lam: Sequence[int], mu: Sequence[int]) -> list[Tableau]:
    """Shape ``lam``, content ``mu``, rows weakly increasing."""
    if sum(lam) != sum(mu):
        raise ValueError("shape and content of different sizes")
    out = []
    for om in contingency_tables(lam, mu):
        out.append(tableau_of_omega(om))
    return sorted(out, key=lambda T: perm_sort_key(tableau_to_double_coset_rep(T, lam, mu)))


def tableau_of_omega(om: tuple) -> Tableau:
    return tuple(tuple(t + 1 for t in range(len(row)) for _ in range(row[t])) for row in om)


def tableau_to_double_coset_rep(T: Tableau, lam: Sequence[int], mu: Sequence[int]) -> Perm:
    n = len(lam)
    om = [[0] * len(mu) for _ in range(n)]
    for s, row in enumerate(T):
        if len(row) != lam[s]:
            raise ValueError("tableau does not have shape lam")
        for t in row:
            om[s][t - 1] += 1
    om = tuple(tuple(row) for row in om)
    return min_rep_of_multi_index(multi_index_of_omega(om, mu), lam)


def double_coset_rep_to_tableau(d: Perm, lam: Sequence[int], mu: Sequence[int]) -> Tableau:
    return tableau_of_omega(omega_matrix(lam, mu, d))


def hook_length_count(lam: Sequence[int]) -> int:
    lam = Composition(lam)
    if not lam.is_partition():
        raise ValueError(f"{tuple(lam)} is not a partition")
    conj = conjugate(lam) if lam.r else Composition()
    hooks = 1
    for i, row in enumerate(lam):
        for j in range(row):
            hooks *= (row - j - 1) + (conj[j] - i - 1) + 1
    return math.factorial(lam.r) // hooks


def standard_tableaux(lam: Sequence[int]) -> Iterator[Tableau]:
    """Standard fillings, by placing ``1..r`` one at a time on outer corners."""
    shape = [p for p in lam if p > 0]
    r = sum(shape)
    rows = [[] for _ in shape]

    def rec(x):
        if x > r:
            yield tuple(tuple(row) for row in rows)
            return
        for i in range(len(shape)):
            if len(rows[i]) < shape[i] and (i == 0 or len(rows[i - 1]) > len(rows[i])):
                rows[i].append(x)
                yield from rec(x + 1)
                rows[i].pop()

    yield from rec(1)


def standard_tableaux_count(lam: Sequence[int]) -> int:
    """Number of standard tableaux, by hook lengths and by enumeration."""
    by_hooks = hook_length_count(lam)
    by_enum = sum(1 for _ in standard_tableaux(lam))
    if by_hooks != by_enum:
        raise AssertionError(f"hook length {by_hooks} != enumeration {by_enum} for {tuple(lam)}")
    return by_hooks
