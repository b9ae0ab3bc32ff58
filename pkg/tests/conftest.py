"""Shared helpers: independent oracles used to cross-check the library.

Everything here is deliberately written from scratch (naive elimination,
minor expansion, subword products) so that tests never validate the
library against itself.
"""

import itertools
from fractions import Fraction

from flagorbits import Composition


def compositions(n):
    """All compositions of n."""
    for k in range(1, n + 1):
        for cuts in itertools.combinations(range(1, n), k - 1):
            parts, prev = [], 0
            for c in list(cuts) + [n]:
                parts.append(c - prev)
                prev = c
            yield Composition(tuple(parts))


def bareiss_rank(rows):
    """Fraction-free Gaussian elimination rank of a rational matrix."""
    m = [[Fraction(x) for x in row] for row in rows]
    if not m or not m[0]:
        return 0
    # scale rows to integers first
    scaled = []
    for row in m:
        lcm = 1
        for x in row:
            lcm = lcm * x.denominator // _gcd(lcm, x.denominator)
        scaled.append([int(x * lcm) for x in row])
    m = scaled
    nrows, ncols = len(m), len(m[0])
    rank = 0
    prev = 1
    for col in range(ncols):
        piv = next((r for r in range(rank, nrows) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(rank + 1, nrows):
            for c in range(col + 1, ncols):
                m[r][c] = (m[rank][col] * m[r][c] - m[r][col] * m[rank][c]) // prev
            m[r][col] = 0
        prev = m[rank][col]
        rank += 1
        if rank == nrows:
            break
    return rank


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def gf2_minor_rank(rows):
    """Rank over GF(2) by exhaustive minor expansion (tiny matrices only)."""
    nrows, ncols = len(rows), len(rows[0]) if rows else 0

    def det2(sub):
        k = len(sub)
        if k == 1:
            return sub[0][0] % 2
        total = 0
        for j in range(k):
            if sub[0][j] % 2 == 0:
                continue
            minor = [[sub[i][c] for c in range(k) if c != j]
                     for i in range(1, k)]
            total ^= det2(minor)
        return total

    for size in range(min(nrows, ncols), 0, -1):
        for rsel in itertools.combinations(range(nrows), size):
            for csel in itertools.combinations(range(ncols), size):
                sub = [[rows[r][c] for c in csel] for r in rsel]
                if det2(sub):
                    return size
    return 0


# -- published reference diagrams (node matrices, dimensions, cover edges) --

# GL(3) with row blocks (2,1), complete column flags: 13 nodes
FIGURE1_NODES = [
    (((0, 1), (0, 0), (1, 0)), 0),   # X1
    (((1, 0), (0, 0), (0, 1)), 0),   # X2
    (((1, 0), (0, 1), (0, 0)), 0),   # X3
    (((0, 0), (0, 1), (1, 0)), 1),   # Y1
    (((1, 1), (0, 0), (1, 0)), 1),   # Y2
    (((0, 0), (1, 0), (0, 1)), 1),   # Y3
    (((1, 0), (0, 1), (0, 1)), 1),   # Y4
    (((0, 1), (1, 0), (0, 0)), 1),   # Y5
    (((0, 0), (1, 1), (1, 0)), 2),   # Z1
    (((1, 0), (0, 1), (1, 0)), 2),   # Z2
    (((0, 1), (1, 0), (1, 0)), 2),   # Z3
    (((0, 1), (1, 0), (0, 1)), 2),   # Z4
    (((1, 0), (1, 1), (1, 0)), 3),   # T
]
FIGURE1_EDGES = [
    (0, 3), (0, 4), (1, 4), (1, 5), (1, 6), (2, 6), (2, 7),
    (3, 8), (3, 9), (4, 8), (4, 9), (4, 10), (5, 8), (5, 11),
    (6, 9), (6, 10), (6, 11), (7, 10), (7, 11),
    (8, 12), (9, 12), (10, 12), (11, 12),
]

# GL(4) with row blocks (2,2), lines (column blocks (1,3)): 8 nodes
FIGURE2_NODES = [
    ((0, 0, 1, 0), 0),   # E1
    ((0, 0, 0, 1), 1),   # E2
    ((1, 0, 0, 0), 0),   # F1
    ((0, 1, 0, 0), 1),   # F2
    ((1, 0, 1, 0), 1),   # EF11
    ((0, 1, 1, 0), 2),   # EF12
    ((1, 0, 0, 1), 2),   # EF21
    ((0, 1, 0, 1), 3),   # EF22
]
FIGURE2_EDGES = [
    (2, 3), (2, 4), (0, 1), (0, 4), (3, 5), (1, 6),
    (4, 5), (4, 6), (5, 7), (6, 7),
]


def perm_mult(a, b):
    """(a b)(x) = a(b(x)) for 1-based one-line permutations."""
    return tuple(a[b[i] - 1] for i in range(len(a)))


def reduced_word(perm):
    """A reduced word (list of adjacent transposition indices, 1-based)."""
    word = []
    p = list(perm)
    changed = True
    while changed:
        changed = False
        for i in range(len(p) - 1):
            if p[i] > p[i + 1]:
                p[i], p[i + 1] = p[i + 1], p[i]
                word.append(i + 1)
                changed = True
    word.reverse()
    return word


def bruhat_le_subword(u, v):
    """u <= v in Bruhat order via the subword criterion."""
    n = len(u)
    word = reduced_word(v)
    inv_u = sum(1 for i in range(n) for j in range(i + 1, n)
                if u[i] > u[j])
    identity = tuple(range(1, n + 1))

    def s(i):
        p = list(identity)
        p[i - 1], p[i] = p[i], p[i - 1]
        return tuple(p)

    for picks in itertools.combinations(range(len(word)), inv_u):
        prod = identity
        for t in picks:
            prod = perm_mult(prod, s(word[t]))
        if prod == tuple(u):
            return True
    return inv_u == 0 and tuple(u) == identity
