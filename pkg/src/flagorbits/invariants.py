"""Rank invariants separating double cosets.

``rank_js(f, J, s)`` is the rank of the row-J submatrix of the s-th
prefix of a flag representative.  It is invariant under the left action
of the block Borel exactly when J meets every row block in a suffix;
``invariant_family`` enumerates that family, and ``signature`` evaluates
all of it at once.  The corner counts ``bruhat_rij`` are the classical
baseline on permutation matrices.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from typing import Sequence

from .flags import Composition, Flag, invariant_row_sets, random_borel_prime, act
from .linalg import QQ, integer_rank, gf


@dataclass(frozen=True)
class JFamily:
    """Ordered family of (s, J) pairs whose rank maps are B'-invariant."""

    nn: Composition
    mm: Composition
    entries: tuple[tuple[int, tuple[int, ...]], ...]  # (s, rows J), sorted

    def __len__(self):
        return len(self.entries)

    def index(self):
        return {e: i for i, e in enumerate(self.entries)}


@dataclass(frozen=True)
class Signature:
    """Values of every invariant rank map on one flag."""

    family: JFamily
    values: tuple[int, ...]

    def value(self, s: int, J: tuple[int, ...]) -> int:
        return self.values[self.family.index()[(s, J)]]

    def serialize(self) -> str:
        lines = []
        for (s, J), v in zip(self.family.entries, self.values):
            jtxt = "{" + ",".join(str(j) for j in J) + "}"
            lines.append(f"s={s} J={jtxt} r={v}")
        return "\n".join(lines)

    def hash(self) -> str:
        return hashlib.sha256(self.serialize().encode()).hexdigest()[:12]


def rank_js(f: Flag, J: Sequence[int], s: int) -> int:
    """Rank of the row-J submatrix of the s-th prefix (J is 1-based)."""
    if not 1 <= s <= len(f.typ) - 1:
        raise ValueError(f"s={s} out of range for type {f.typ}")
    rows = sorted(set(J))
    if not rows or rows[0] < 1 or rows[-1] > f.n:
        raise ValueError(f"row set {J} out of range")
    prefix = f.prefix_columns(s)
    sub = prefix.row_submatrix([r - 1 for r in rows])
    if f.field is QQ:
        if all(x.denominator == 1 for row in sub.data for x in row):
            return integer_rank([[int(x) for x in row] for row in sub.data])
    return sub.rank()


def invariant_family(nn: Composition, mm: Composition) -> JFamily:
    """The family of all (s, J) with a B'-invariant rank map.

    J ranges over nonempty unions of per-block row suffixes (the exact
    stability condition for the block Borel), s over the proper prefixes
    of ``mm``.  Entries are sorted by (s, |J|, J) so signatures serialize
    canonically.
    """
    if nn.n != mm.n:
        raise ValueError("compositions of different integers")
    js = invariant_row_sets(nn)
    entries = []
    for s in range(1, len(mm)):
        for J in js:
            entries.append((s, J))
    entries.sort(key=lambda e: (e[0], len(e[1]), e[1]))
    return JFamily(nn, mm, tuple(entries))


def signature(f: Flag, fam: JFamily) -> Signature:
    if f.n != fam.nn.n or f.typ != fam.mm:
        raise ValueError("family does not match the flag")
    values = tuple(rank_js(f, J, s) for s, J in fam.entries)
    return Signature(fam, values)


def dominates(a: Signature, b: Signature) -> bool:
    """True when every entry of ``a`` is at most the matching entry of ``b``.

    By lower semicontinuity of rank this is necessary for the orbit of
    ``a`` to lie in the closure of the orbit of ``b``.
    """
    if a.family.entries != b.family.entries:
        raise ValueError("signatures over different families")
    return all(x <= y for x, y in zip(a.values, b.values))


def verify_family_invariance(fam: JFamily, trials: int = 8,
                             seed: int | None = None) -> None:
    """Randomized guard: every family entry must be constant on B'-orbits.

    Probes random flags and random B' elements over GF(3); raises
    ``AssertionError`` on any violation.  Cheap enough to run at the start
    of every catalog enumeration.
    """
    from .flags import random_flag  # local import to avoid cycle noise

    rng = random.Random(seed if seed is not None
                        else hash((fam.nn.parts, fam.mm.parts)) & 0xFFFF)
    F = gf(3)
    for _ in range(trials):
        f = random_flag(fam.mm, F, rng)
        g = random_borel_prime(fam.nn, F, rng)
        moved = act(g, f)
        for s, J in fam.entries:
            if rank_js(f, J, s) != rank_js(moved, J, s):
                raise AssertionError(
                    f"rank map (s={s}, J={J}) is not B'-invariant for {fam.nn}")


def bruhat_rij(perm: Sequence[int], i: int, j: int) -> int:
    """Count of s <= j with perm(s) >= n-i+1 (perm is 1-based one-line).

    Equals the rank of the lower-left i x j corner of the permutation
    matrix.
    """
    n = len(perm)
    if not (1 <= i <= n - 1 and 1 <= j <= n - 1):
        raise ValueError("corner indices must lie in 1..n-1")
    return sum(1 for s in range(1, j + 1) if perm[s - 1] >= n - i + 1)


def bruhat_vector(perm: Sequence[int]) -> tuple[int, ...]:
    n = len(perm)
    return tuple(bruhat_rij(perm, i, j)
                 for i in range(1, n) for j in range(1, n))
