"""Compositions, flags with canonical representatives, and related groups.

A flag of type ``(m_1, ..., m_l)`` in n-space is stored as an
``n x (m_1 + ... + m_{l-1})`` full-column-rank matrix, the last block
being redundant.  Two matrices describe the same flag exactly when they
differ by the right action of the block-upper-triangular group, so every
:class:`Flag` holds the unique canonical representative and flag equality
is entry-wise equality.

The canonical form processes blocks left to right: block j's columns are
cleared along the pivot rows of blocks 1..j-1, column-reduced with
first-nonzero-row pivots scaled to 1, mutually cleared inside the block,
and finally ordered by pivot row.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .linalg import Field, Matrix, QQ, parse_matrix_literal


@dataclass(frozen=True)
class Composition:
    """Ordered tuple of positive integers; indexes block structures."""

    parts: tuple[int, ...]

    def __post_init__(self):
        if not self.parts or any(p < 1 for p in self.parts):
            raise ValueError(f"invalid composition {self.parts}")

    @staticmethod
    def of(*parts: int) -> "Composition":
        return Composition(tuple(parts))

    @staticmethod
    def parse(text: str) -> "Composition":
        return Composition(tuple(int(t) for t in text.replace(",", " ").split()))

    @property
    def n(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    def prefix_sums(self) -> list[int]:
        """[0, p_1, p_1+p_2, ..., n]"""
        acc = [0]
        for p in self.parts:
            acc.append(acc[-1] + p)
        return acc

    def block_range(self, j: int) -> range:
        """Zero-based row/column range of block j (zero-based)."""
        ps = self.prefix_sums()
        return range(ps[j], ps[j + 1])

    def block_of(self, index: int) -> int:
        """Zero-based block containing zero-based position ``index``."""
        ps = self.prefix_sums()
        for j in range(len(self.parts)):
            if ps[j] <= index < ps[j + 1]:
                return j
        raise IndexError(index)

    def __str__(self):
        return ",".join(str(p) for p in self.parts)


def subcomposition_witness(m: Composition, n: Composition) -> Optional[tuple[int, ...]]:
    """Grouping witness ``(i_1, ..., i_l)`` when consecutive blocks of ``n``
    merge into ``m``; ``None`` when no grouping exists.

    Raises ``ValueError`` when the totals differ.
    """
    if m.n != n.n:
        raise ValueError("compositions of different integers")
    witness = []
    pos = 0
    for target in m.parts:
        count = 0
        acc = 0
        while acc < target and pos < len(n.parts):
            acc += n.parts[pos]
            pos += 1
            count += 1
        if acc != target:
            return None
        witness.append(count)
    if pos != len(n.parts):
        return None
    return tuple(witness)


def _canonical_rep(mat: Matrix, boundaries: Sequence[int]) -> Matrix:
    """Canonical representative modulo the right block-upper action.

    ``boundaries`` are the column indices where blocks start (ascending,
    first entry 0).  Raises ``ValueError`` on rank deficiency.
    """
    F = mat.field
    n, C = mat.rows, mat.cols
    if C == 0:
        return mat
    cols = [list(mat.column(j)) for j in range(C)]
    used = [False] * n
    pivots: list[int] = []      # pivot row per processed column
    block_of_col = []
    for j in range(len(boundaries)):
        hi = boundaries[j + 1] if j + 1 < len(boundaries) else C
        block_of_col.extend([j] * (hi - boundaries[j]))

    for c in range(C):
        col = cols[c]
        # clear the pivot rows of all earlier columns (their blocks are <=)
        for pc in range(c):
            r = pivots[pc]
            f = col[r]
            if f != F.zero:
                pcol = cols[pc]
                for i in range(n):
                    if pcol[i] != F.zero:
                        col[i] = F.sub(col[i], F.mul(f, pcol[i]))
        pivot = None
        for i in range(n):
            if not used[i] and col[i] != F.zero:
                pivot = i
                break
        if pivot is None:
            raise ValueError("flag representative is rank deficient")
        inv = F.inv(col[pivot])
        if inv != F.one:
            for i in range(n):
                if col[i] != F.zero:
                    col[i] = F.mul(inv, col[i])
        # clear this pivot row backwards inside the same block
        for pc in range(c):
            if block_of_col[pc] != block_of_col[c]:
                continue
            f = cols[pc][pivot]
            if f != F.zero:
                pcol = cols[pc]
                for i in range(n):
                    if col[i] != F.zero:
                        pcol[i] = F.sub(pcol[i], F.mul(f, col[i]))
        used[pivot] = True
        pivots.append(pivot)

    # order the columns of each block by pivot row
    order: list[int] = []
    for j in range(len(boundaries)):
        lo = boundaries[j]
        hi = boundaries[j + 1] if j + 1 < len(boundaries) else C
        order.extend(sorted(range(lo, hi), key=lambda c: pivots[c]))
    return Matrix.from_columns(F, [cols[c] for c in order])


@dataclass(frozen=True)
class Flag:
    """A flag of type ``typ`` holding its canonical representative."""

    typ: Composition
    rep: Matrix  # canonical, n x (n - m_l), full column rank

    @staticmethod
    def from_matrix(typ: Composition, mat: Matrix) -> "Flag":
        stored = typ.n - typ.parts[-1]
        if mat.rows != typ.n or mat.cols != stored:
            raise ValueError(
                f"flag of type {typ} needs a {typ.n}x{stored} representative, "
                f"got {mat.rows}x{mat.cols}")
        if len(typ) == 1:
            return Flag(typ, mat)
        canon = _canonical_rep(mat, typ.prefix_sums()[: len(typ) - 1])
        return Flag(typ, canon)

    @property
    def field(self) -> Field:
        return self.rep.field

    @property
    def n(self) -> int:
        return self.typ.n

    def block_columns(self, j: int) -> Matrix:
        """Columns of stored block j (zero-based, j < l-1)."""
        return self.rep.col_submatrix(self.typ.block_range(j))

    def prefix_columns(self, s: int) -> Matrix:
        """Columns spanning the s-th subspace (first m_1+...+m_s columns)."""
        return self.rep.col_submatrix(range(self.typ.prefix_sums()[s]))

    def to_literal(self) -> str:
        return f"m: {self.typ} of n={self.n}\n{self.rep.to_literal()}"

    def __str__(self):
        return self.to_literal()


def canonicalize(typ: Composition, mat: Matrix) -> Flag:
    """Canonical flag of an arbitrary full-column-rank representative.

    Idempotent: flags always store their canonical representative, so
    applying this to ``f.rep`` reproduces ``f``.
    """
    return Flag.from_matrix(typ, mat)


def flags_equal(a: Flag, b: Flag) -> bool:
    if a.typ != b.typ:
        raise ValueError(f"flag type mismatch: {a.typ} vs {b.typ}")
    if a.field != b.field:
        raise ValueError("flag field mismatch")
    return a.rep.data == b.rep.data


def parse_flag_literal(text: str) -> Flag:
    lines = text.strip().splitlines()
    head = lines[0].strip()
    if not head.startswith("m:") or " of n=" not in head:
        raise ValueError("flag literal must start with 'm: ... of n=...'")
    comp_text, n_text = head[2:].split(" of n=")
    typ = Composition.parse(comp_text.strip())
    if typ.n != int(n_text):
        raise ValueError("composition does not sum to the declared n")
    mat = parse_matrix_literal("\n".join(lines[1:]))
    return Flag.from_matrix(typ, mat)


# -- permutations -----------------------------------------------------------


def permutation_matrix(field: Field, perm: Sequence[int]) -> Matrix:
    """Matrix sending e_j to e_{perm(j)}; ``perm`` is 1-based one-line."""
    n = len(perm)
    cols = []
    for j in range(n):
        v = [field.zero] * n
        v[perm[j] - 1] = field.one
        cols.append(v)
    return Matrix.from_columns(field, cols)


def flag_from_permutation(perm: Sequence[int], typ: Composition,
                          field: Field = QQ) -> Flag:
    stored = typ.n - typ.parts[-1]
    cols = []
    for j in range(stored):
        v = [field.zero] * typ.n
        v[perm[j] - 1] = field.one
        cols.append(v)
    if not cols:
        return Flag.from_matrix(typ, Matrix.zero(field, typ.n, 0))
    return Flag.from_matrix(typ, Matrix.from_columns(field, cols))


def standard_flag(typ: Composition, field: Field = QQ) -> Flag:
    return flag_from_permutation(list(range(1, typ.n + 1)), typ, field)


# -- group elements ----------------------------------------------------------


@dataclass(frozen=True)
class GroupElement:
    """Invertible matrix with an optional membership tag."""

    mat: Matrix
    tag: Optional[str] = None

    def __post_init__(self):
        if not self.mat.is_invertible():
            raise ValueError("group element must be invertible")


def is_block_upper(mat: Matrix, shape: Composition) -> bool:
    """Membership test for the standard parabolic of the given shape."""
    for i in range(mat.rows):
        for j in range(mat.cols):
            if shape.block_of(i) > shape.block_of(j) and mat[i, j] != mat.field.zero:
                return False
    return True


def is_borel_prime(mat: Matrix, nn: Composition) -> bool:
    """Membership in B': block diagonal with upper-triangular blocks."""
    F = mat.field
    for i in range(mat.rows):
        for j in range(mat.cols):
            if mat[i, j] != F.zero:
                if nn.block_of(i) != nn.block_of(j) or i > j:
                    return False
    return all(mat[i, i] != F.zero for i in range(mat.rows))


def act(g: Matrix, f: Flag) -> Flag:
    """Left action on flags: the canonical flag of ``g @ rep``."""
    if g.rows != f.n or g.cols != f.n:
        raise ValueError("acting matrix has the wrong size")
    if f.rep.cols == 0:
        return f
    return Flag.from_matrix(f.typ, g * f.rep)


def project(f: Flag, target: Composition) -> Flag:
    """Natural projection onto a coarser flag type (block merging)."""
    witness = subcomposition_witness(target, f.typ)
    if witness is None:
        raise ValueError(f"{target} is not a subcomposition of {f.typ}")
    stored = target.n - target.parts[-1]
    return Flag.from_matrix(target, f.rep.col_submatrix(range(stored)))


def complete_to_invertible(mat: Matrix) -> Matrix:
    """Deterministic greedy completion to an invertible square matrix.

    Standard basis vectors are appended in index order whenever they
    enlarge the span; input columns must be independent.
    """
    F = mat.field
    n = mat.rows
    cols = [list(mat.column(j)) for j in range(mat.cols)]
    work = Matrix.from_columns(F, cols) if cols else Matrix.zero(F, n, 0)
    current_rank = len(cols)
    if work.cols and work.rank() != current_rank:
        raise ValueError("columns are not independent")
    for i in range(n):
        if current_rank == n:
            break
        v = [F.zero] * n
        v[i] = F.one
        candidate_cols = cols + [v]
        cand = Matrix.from_columns(F, candidate_cols)
        if cand.rank() == current_rank + 1:
            cols = candidate_cols
            current_rank += 1
    out = Matrix.from_columns(F, cols)
    if out.rank() != n:
        raise ValueError("completion failed")
    return out


def dual(f: Flag) -> Flag:
    """Orthogonal-complement flag: type ``(m_1..m_l)`` to ``(m_l..m_1)``.

    Each nested subspace is replaced by the kernel of its transpose
    (the standard dot product, no conjugation), mirroring the chain.
    """
    target = Composition(tuple(reversed(f.typ.parts)))
    F = f.field
    n = f.n
    src_ps = f.typ.prefix_sums()
    tgt_ps = target.prefix_sums()
    cols: list[list] = []
    for j in range(1, len(target)):
        # the j-th dual subspace is the orthogonal of the source prefix l-j
        span = f.rep.col_submatrix(range(src_ps[len(f.typ) - j]))
        if span.cols == 0:
            orth = Matrix.identity(F, n)
        else:
            orth = span.transpose().kernel_basis()
        for c in range(orth.cols):
            if len(cols) == tgt_ps[j]:
                break
            v = list(orth.column(c))
            if Matrix.from_columns(F, cols + [v]).rank() == len(cols) + 1:
                cols.append(v)
        if len(cols) != tgt_ps[j]:
            raise ValueError("dual flag construction failed")
    mat = Matrix.from_columns(F, cols) if cols else Matrix.zero(F, n, 0)
    return Flag.from_matrix(target, mat)


# -- maximal parabolics over B' and P ---------------------------------------


@dataclass(frozen=True)
class ParabolicSpec:
    """Parabolic ``M_perm P_shape M_perm^{-1}``; perm is 1-based one-line."""

    shape: Composition
    perm: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(1, self.shape.n + 1)):
            raise ValueError("perm is not a permutation")

    def contains(self, mat: Matrix) -> bool:
        F = mat.field
        inv = [0] * len(self.perm)
        for j, pj in enumerate(self.perm):
            inv[pj - 1] = j
        for i in range(mat.rows):
            for j in range(mat.cols):
                if mat[i, j] != F.zero and \
                        self.shape.block_of(inv[i]) > self.shape.block_of(inv[j]):
                    return False
        return True


def invariant_row_sets(nn: Composition) -> list[tuple[int, ...]]:
    """All nonempty row sets J fixed by B': unions of per-block suffixes.

    A row set is B'-stable exactly when its complement is spanned by an
    initial run of each block, i.e. J meets every block in a suffix.
    Sorted deterministically.
    """
    suffix_choices = []
    ps = nn.prefix_sums()
    for b, size in enumerate(nn.parts):
        opts = [()]  # empty suffix
        for start in range(size, 0, -1):
            opts.append(tuple(range(ps[b] + start, ps[b] + size + 1)))
        suffix_choices.append(opts)
    out = set()
    for combo in itertools.product(*suffix_choices):
        J = tuple(sorted(i for part in combo for i in part))
        if J:
            out.add(J)
    return sorted(out, key=lambda J: (len(J), J))


def qfamily(kind: str, comp: Composition) -> list[ParabolicSpec]:
    """Maximal parabolics containing B' (kind='Bprime') or P (kind='P').

    For B' the family is derived from the invariant row sets: one
    parabolic per proper nonempty J, namely the stabilizer of the span of
    the standard vectors outside J.  (A folklore count of 2n-2 for two
    blocks holds only when one block has size 1; the derived family is
    what the rank invariants actually use.)
    """
    n = comp.n
    if kind == "P":
        ps = comp.prefix_sums()
        return [ParabolicSpec(Composition.of(ps[s], n - ps[s]),
                              tuple(range(1, n + 1)))
                for s in range(1, len(comp))]
    if kind != "Bprime":
        raise ValueError("kind must be 'Bprime' or 'P'")
    specs = []
    for J in invariant_row_sets(comp):
        if len(J) == n:
            continue  # the full row set stabilizes everything
        comp_rows = [i for i in range(1, n + 1) if i not in J]
        perm_positions = comp_rows + list(J)
        perm = [0] * n
        for pos, row in enumerate(perm_positions):
            perm[pos] = row
        specs.append(ParabolicSpec(Composition.of(n - len(J), len(J)),
                                   tuple(perm)))
    return specs


# -- random elements for property checks ------------------------------------


def random_borel_prime(nn: Composition, field: Field, rng: random.Random) -> Matrix:
    """Random element of B' over the given field."""
    n = nn.n
    rows = [[field.zero] * n for _ in range(n)]
    for b in range(len(nn)):
        rng_rows = nn.block_range(b)
        for i in rng_rows:
            rows[i][i] = _random_nonzero(field, rng)
            for j in rng_rows:
                if j > i:
                    rows[i][j] = _random_scalar(field, rng)
    return Matrix.from_rows(field, rows)


def random_parabolic(mm: Composition, field: Field, rng: random.Random) -> Matrix:
    """Random element of the standard block-upper parabolic of shape mm."""
    n = mm.n
    rows = [[field.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if mm.block_of(i) < mm.block_of(j):
                rows[i][j] = _random_scalar(field, rng)
    # invertible blocks on the diagonal
    for b in range(len(mm)):
        block = list(mm.block_range(b))
        while True:
            sub = [[_random_scalar(field, rng) for _ in block] for _ in block]
            if Matrix.from_rows(field, sub).is_invertible():
                break
        for bi, i in enumerate(block):
            for bj, j in enumerate(block):
                rows[i][j] = sub[bi][bj]
    return Matrix.from_rows(field, rows)


def random_flag(typ: Composition, field: Field, rng: random.Random) -> Flag:
    n = typ.n
    stored = n - typ.parts[-1]
    while True:
        mat = Matrix.from_rows(
            field, [[_random_scalar(field, rng) for _ in range(stored)]
                    for _ in range(n)])
        if stored == 0 or mat.rank() == stored:
            return Flag.from_matrix(typ, mat)


def _random_scalar(field: Field, rng: random.Random):
    if field is QQ:
        return field.coerce(rng.randint(-3, 3))
    return rng.randrange(field.p)  # type: ignore[attr-defined]


def _random_nonzero(field: Field, rng: random.Random):
    while True:
        x = _random_scalar(field, rng)
        if x != field.zero:
            return x
