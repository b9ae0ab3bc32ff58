"""Case classification, normal forms, reducers, and non-injectivity witnesses.

The seven finiteness rows (by ``k = len(nn)``, ``N = min(nn)``,
``l = len(mm)``, ``M = min(mm)``) are matched in display order; the first
matching row names the case.  Each case with a classification gets a
normal-form data type, a realization into a 0/1 flag matrix, and a
reducer:

* case 0 (two blocks on both sides) -- a constructive triangular
  reduction plus an independent decoder that rebuilds the normal form
  from rank differences alone;
* case III' (one row block of size one) -- Gauss-Jordan without row
  permutations, a pivot block, and a decreasing chain of marked rows;
* cases I, II, III and I' with middle block 1 -- catalogs of 0/1
  representatives deduplicated by signature (sound because the rank
  signature separates orbits in these cases), reduced by signature
  lookup.

Non-injective shapes (I' with an outer block of size 1 and n >= 5, and
all of II') refuse reduction and instead expose an explicit witness pair:
two flags with identical signatures in different orbits.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .flags import (Composition, Flag, act, dual, flags_equal,
                    permutation_matrix, complete_to_invertible)
from .invariants import Signature, invariant_family, signature
from .linalg import Field, Matrix, QQ, gf


class InfinitePairError(ValueError):
    """The pair has infinitely many double cosets (no table row matches)."""


class NonInjectiveError(ValueError):
    """Signatures do not separate orbits for this pair; witnesses attached."""

    def __init__(self, message, witnesses=None):
        super().__init__(message)
        self.witnesses = witnesses


class UnsupportedCaseError(ValueError):
    """The pair is finite (and separable) but no classification is available."""


class CatalogLookupError(ValueError):
    """A signature failed to match any catalog entry (catalog/invariance bug)."""


class InconsistentSignatureError(ValueError):
    """No flag attains the given signature."""


@dataclass(frozen=True)
class CaseTag:
    label: str                 # one of 0 I II III I' II' III'
    subcase: Optional[str] = None
    injective: bool = True

    def __str__(self):
        if self.subcase:
            return f"{self.label} [{self.subcase}]"
        return self.label


def classify_pair(nn: Composition, mm: Composition) -> Optional[CaseTag]:
    """First matching finiteness row, or ``None`` for an infinite pair."""
    if nn.n != mm.n:
        raise ValueError("compositions of different integers")
    k, l = len(nn), len(mm)
    N, M = min(nn.parts), min(mm.parts)
    n = nn.n
    if k == 2 and l == 2:
        return CaseTag("0")
    if k == 3 and N == 1 and l == 2 and M >= 2:
        return CaseTag("I")
    if k == 3 and N >= 2 and l == 2 and M == 2:
        sub = "(2,n-2)" if mm.parts[0] == 2 else "(n-2,2)"
        return CaseTag("II", sub)
    if l == 2 and M == 1:
        sub = "(1,n-1)" if mm.parts[0] == 1 else "(n-1,1)"
        return CaseTag("III", sub)
    if k == 2 and N >= 2 and l == 3 and M == 1:
        if mm.parts[1] == 1:
            return CaseTag("I'", "m2=1")
        sub = "m1=1" if mm.parts[0] == 1 else "m3=1"
        return CaseTag("I'", sub, injective=n <= 4)
    if k == 2 and N == 2 and l == 3 and M >= 2:
        return CaseTag("II'", injective=False)
    if k == 2 and N == 1:
        sub = "(n-1,1)" if nn.parts[0] == n - 1 else "(1,n-1)"
        return CaseTag("III'", sub)
    return None


def has_catalog(tag: CaseTag) -> bool:
    """True when the case has an implemented normal-form classification."""
    if tag.label in ("0", "I", "II", "III", "III'"):
        return True
    return tag.label == "I'" and tag.subcase == "m2=1"


# ---------------------------------------------------------------------------
# triangular reduction (upper-triangular x general linear orbits)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TriangularReduction:
    indices: tuple[int, ...]       # 1-based pivot rows, strictly increasing
    canonical: Matrix              # (e_{i_1} ... e_{i_r} 0 ... 0)
    left: Matrix                   # upper triangular
    right: Matrix                  # invertible; left * a * right == canonical


def triangular_reduce(a: Matrix) -> TriangularReduction:
    """Canonical form of ``a`` under upper-triangular rows x arbitrary columns.

    Returns strictly increasing pivot rows ``i_1 < ... < i_r`` with the
    canonical matrix ``(e_{i_1} ... e_{i_r} 0 ... 0)`` and certifying
    transformations.
    """
    F = a.field
    p, q = a.rows, a.cols
    cols = [list(a.column(j)) for j in range(q)]
    left = [list(r) for r in Matrix.identity(F, p).data]
    right = [list(r) for r in Matrix.identity(F, q).data]

    def col_axpy(dst, src, c):
        # col_dst += c * col_src, mirrored on the right certificate
        for i in range(p):
            cols[dst][i] = F.add(cols[dst][i], F.mul(c, cols[src][i]))
        for i in range(q):
            right[i][dst] = F.add(right[i][dst], F.mul(c, right[i][src]))

    def col_scale(j, c):
        for i in range(p):
            cols[j][i] = F.mul(c, cols[j][i])
        for i in range(q):
            right[i][j] = F.mul(c, right[i][j])

    def row_axpy(dst, src, c):
        # row_dst += c * row_src (dst < src keeps the left factor triangular)
        for j in range(q):
            cols[j][dst] = F.add(cols[j][dst], F.mul(c, cols[j][src]))
        for j in range(p):
            left[dst][j] = F.add(left[dst][j], F.mul(c, left[src][j]))

    def row_scale(i, c):
        for j in range(q):
            cols[j][i] = F.mul(c, cols[j][i])
        for j in range(p):
            left[i][j] = F.mul(c, left[i][j])

    remaining = list(range(q))
    pivots: list[tuple[int, int]] = []  # (row, col)
    while True:
        r = -1
        for i in range(p - 1, -1, -1):
            if any(cols[c][i] != F.zero for c in remaining):
                r = i
                break
        if r < 0:
            break
        c0 = next(c for c in remaining if cols[c][r] != F.zero)
        col_scale(c0, F.inv(cols[c0][r]))
        for c in range(q):
            if c != c0 and cols[c][r] != F.zero:
                col_axpy(c, c0, F.sub(F.zero, cols[c][r]))
        for i in range(r - 1, -1, -1):
            if cols[c0][i] != F.zero:
                row_axpy(i, r, F.sub(F.zero, cols[c0][i]))
        pivots.append((r, c0))
        remaining.remove(c0)

    # order pivot columns by pivot row, zero columns last
    pivots.sort()
    order = [c for _, c in pivots] + remaining
    perm = Matrix.from_columns(
        F, [[F.one if i == order[j] else F.zero for i in range(q)]
            for j in range(q)])
    canonical = Matrix.from_columns(F, [cols[c] for c in order]) \
        if q else Matrix.zero(F, p, 0)
    right_m = Matrix.from_rows(F, right) * perm
    left_m = Matrix.from_rows(F, left)
    return TriangularReduction(
        tuple(r + 1 for r, _ in pivots), canonical, left_m, right_m)


# ---------------------------------------------------------------------------
# normal form data types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NFCase0:
    """Two-block normal form: columns carrying f-rows (sorted by the f index,
    each optionally paired with an e index) followed by sorted pure e columns.
    """

    nn: Composition
    mm: Composition
    cols: tuple[tuple[Optional[int], Optional[int]], ...]  # (e, f), 1-based

    @property
    def s(self) -> int:
        return sum(1 for _, f in self.cols if f is not None)

    @property
    def r(self) -> int:
        return sum(1 for e, f in self.cols if f is not None and e is None)

    def serialize(self) -> str:
        carriers = [(e, f) for e, f in self.cols if f is not None]
        tail = [e for e, f in self.cols if f is None]
        i_txt = ",".join(str(f) for _, f in carriers)
        j_txt = ",".join("_" if e is None else str(e) for e, _ in carriers)
        t_txt = ",".join(str(e) for e in tail)
        return (f"case=0 r={self.r} s={self.s} "
                f"i=[{i_txt}] j=[{j_txt};{t_txt}]")

    def realize(self, fld: Field = QQ) -> Flag:
        n1 = self.nn.parts[0]
        n = self.nn.n
        columns = []
        for e, f in self.cols:
            v = [fld.zero] * n
            if e is not None:
                v[e - 1] = fld.one
            if f is not None:
                v[n1 + f - 1] = fld.one
            columns.append(v)
        return Flag.from_matrix(self.mm, Matrix.from_columns(fld, columns))


@dataclass(frozen=True)
class NFChain:
    """Normal form for the one-small-row-block case: a pivot block ``j0``
    (1-based, possibly the dropped last block), disjoint marked row sets for
    the stored blocks, and a chain of (block, row) marks with increasing
    blocks past ``j0`` and strictly decreasing rows.
    """

    nn: Composition            # original orientation, (n-1,1) or (1,n-1)
    mm: Composition
    j0: int
    blocks: tuple[tuple[int, ...], ...]   # stored blocks 1..l-1, sorted rows
    chain: tuple[tuple[int, int], ...]    # (block, row) pairs

    @property
    def swapped(self) -> bool:
        return self.nn.parts[0] == 1 and self.nn.n > 2

    def serialize(self) -> str:
        btxt = "|".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)
        ctxt = ",".join(f"({j}:{i})" for j, i in self.chain)
        return f"case=III' j0={self.j0} blocks=[{btxt}] chain=[{ctxt}]"

    def realize(self, fld: Field = QQ) -> Flag:
        n = self.nn.n
        columns = []
        for bi, rows in enumerate(self.blocks, start=1):
            if bi == self.j0:
                v = [fld.zero] * n
                v[n - 1] = fld.one
                for _, i in self.chain:
                    v[i - 1] = fld.one
                columns.append(v)
            for p in rows:
                v = [fld.zero] * n
                v[p - 1] = fld.one
                columns.append(v)
        mat = Matrix.from_columns(fld, columns) if columns \
            else Matrix.zero(fld, n, 0)
        f = Flag.from_matrix(self.mm, mat)
        if self.swapped:
            rho = _rotation_perm(n)
            f = act(permutation_matrix(fld, _inverse_perm(rho)), f)
        return f


@dataclass(frozen=True)
class NFPattern:
    """Catalog entry for the signature-lookup cases: a 0/1 representative on
    the primal side together with the transform back to the original pair
    (a row relabeling for case I, the orthogonal swap for dual subcases).
    """

    case: str
    subcase: Optional[str]
    nn: Composition
    mm: Composition
    primal_mm: Composition
    matrix01: tuple[tuple[int, ...], ...]   # primal-side rows
    row_perm: Optional[tuple[int, ...]] = None
    dualize: bool = False

    def serialize(self) -> str:
        cols = []
        ncols = len(self.matrix01[0]) if self.matrix01 else 0
        for j in range(ncols):
            terms = [f"x{i + 1}" for i in range(len(self.matrix01))
                     if self.matrix01[i][j]]
            cols.append("+".join(terms) if terms else "0")
        extra = ""
        if self.row_perm:
            extra = " perm=[" + ",".join(map(str, self.row_perm)) + "]"
        if self.dualize:
            extra = " dual=1"
        sub = f" [{self.subcase}]" if self.subcase else ""
        return f"case={self.case}{sub} cols=[{';'.join(cols)}]{extra}"

    def realize(self, fld: Field = QQ) -> Flag:
        mat = Matrix.from_rows(fld, self.matrix01)
        f = Flag.from_matrix(self.primal_mm, mat)
        if self.dualize:
            w = _block_reversal_perm(self.nn)
            f = dual(act(permutation_matrix(fld, w), f))
        if self.row_perm:
            f = act(permutation_matrix(fld, _inverse_perm(self.row_perm)), f)
        return f


NormalForm = NFCase0 | NFChain | NFPattern


def realize(nf: NormalForm, fld: Field = QQ) -> Flag:
    return nf.realize(fld)


def serialize_normal_form(nf: NormalForm) -> str:
    return nf.serialize()


# -- permutation helpers -----------------------------------------------------


def _inverse_perm(perm: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for j, pj in enumerate(perm):
        inv[pj - 1] = j + 1
    return tuple(inv)


def _rotation_perm(n: int) -> tuple[int, ...]:
    """sigma with sigma(1) = n, sigma(i) = i-1: conjugates the (1, n-1)
    block Borel onto the standard (n-1, 1) one."""
    return (n,) + tuple(range(1, n))


def _block_reversal_perm(nn: Composition) -> tuple[int, ...]:
    """Order reversal inside every row block (an involution); conjugates the
    transposed block Borel back to the standard one."""
    perm = []
    ps = nn.prefix_sums()
    for b, size in enumerate(nn.parts):
        perm.extend(range(ps[b] + size, ps[b], -1))
    return tuple(perm)


def _case1_row_perm(nn: Composition) -> tuple[tuple[int, ...], Composition]:
    """Row relabeling moving the first size-1 block of ``nn`` to the front.

    Returns (rho, permuted_nn) where row r of the original setup becomes
    row rho(r) of the canonical one.
    """
    t = next(i for i, p in enumerate(nn.parts) if p == 1)
    order = [t] + [i for i in range(len(nn.parts)) if i != t]
    ps = nn.prefix_sums()
    rho = [0] * nn.n
    new_pos = 1
    for b in order:
        for r in range(ps[b] + 1, ps[b + 1] + 1):
            rho[r - 1] = new_pos
            new_pos += 1
    return tuple(rho), Composition(tuple(nn.parts[b] for b in order))


# ---------------------------------------------------------------------------
# case 0: constructive reduction and signature decoding
# ---------------------------------------------------------------------------


def reduce_case0(f: Flag, nn: Composition, check: bool = True) -> NFCase0:
    """Unique two-block normal form by triangular elimination.

    Stages: canonicalize the lower (f-)rows bottom-up, reduce the f-free
    columns' upper parts, then peel paired columns off largest upper row
    first.  With ``check`` the result is verified against the flag's
    signature.
    """
    if len(nn) != 2 or len(f.typ) != 2:
        raise ValueError(f"pair ({nn}, {f.typ}) is not a two-block pair")
    F = f.field
    n1, n2 = nn.parts
    n = nn.n
    m1 = f.typ.parts[0]
    cols = [list(f.rep.column(j)) for j in range(m1)]

    def col_axpy(dst, src, c):
        for i in range(n):
            cols[dst][i] = F.add(cols[dst][i], F.mul(c, cols[src][i]))

    def col_scale(j, c):
        for i in range(n):
            cols[j][i] = F.mul(c, cols[j][i])

    def row_axpy(dst, src, c):
        for j in range(m1):
            cols[j][dst] = F.add(cols[j][dst], F.mul(c, cols[j][src]))

    def row_scale(i, c):
        for j in range(m1):
            cols[j][i] = F.mul(c, cols[j][i])

    # stage 1: bottom-up pivots on the f-rows
    remaining = list(range(m1))
    f_pivot: dict[int, int] = {}
    for r in range(n - 1, n1 - 1, -1):
        c0 = next((c for c in remaining if cols[c][r] != F.zero), None)
        if c0 is None:
            continue
        col_scale(c0, F.inv(cols[c0][r]))
        for c in range(m1):
            if c != c0 and cols[c][r] != F.zero:
                col_axpy(c, c0, F.sub(F.zero, cols[c][r]))
        for i in range(r - 1, n1 - 1, -1):
            if cols[c0][i] != F.zero:
                row_axpy(i, r, F.sub(F.zero, cols[c0][i]))
        f_pivot[c0] = r
        remaining.remove(c0)

    # stage 2: bottom-up pivots on the e-rows of the f-free columns
    tail_pivot: dict[int, int] = {}
    tail_remaining = list(remaining)
    for r in range(n1 - 1, -1, -1):
        c0 = next((c for c in tail_remaining if cols[c][r] != F.zero), None)
        if c0 is None:
            continue
        col_scale(c0, F.inv(cols[c0][r]))
        for c in range(m1):
            if c != c0 and cols[c][r] != F.zero:
                col_axpy(c, c0, F.sub(F.zero, cols[c][r]))
        for i in range(r - 1, -1, -1):
            if cols[c0][i] != F.zero:
                row_axpy(i, r, F.sub(F.zero, cols[c0][i]))
        tail_pivot[c0] = r
        tail_remaining.remove(c0)
    if tail_remaining:
        raise ValueError("flag representative is rank deficient")

    # stage 3: peel paired columns, largest e-row first
    active = sorted(f_pivot, key=lambda c: f_pivot[c])
    pair_e: dict[int, int] = {}
    while True:
        m_row = -1
        for i in range(n1 - 1, -1, -1):
            if any(cols[c][i] != F.zero for c in active):
                m_row = i
                break
        if m_row < 0:
            break
        j0 = next(c for c in active if cols[c][m_row] != F.zero)
        row_scale(m_row, F.inv(cols[j0][m_row]))
        # clear the marked row from the other carriers first, repairing
        # their f-rows; only then clean up above the mark inside j0
        for c in list(active):
            if c == j0 or cols[c][m_row] == F.zero:
                continue
            y = cols[c][m_row]
            col_axpy(c, j0, F.sub(F.zero, y))
            row_axpy(f_pivot[j0], f_pivot[c], y)
        for i in range(m_row - 1, -1, -1):
            if cols[j0][i] != F.zero:
                row_axpy(i, m_row, F.sub(F.zero, cols[j0][i]))
        pair_e[j0] = m_row
        active.remove(j0)

    carriers = sorted(f_pivot, key=lambda c: f_pivot[c])
    out_cols: list[tuple[Optional[int], Optional[int]]] = []
    for c in carriers:
        fi = f_pivot[c] - n1 + 1
        e = pair_e.get(c)
        out_cols.append((None if e is None else e + 1, fi))
    for c in sorted(tail_pivot, key=lambda c: tail_pivot[c]):
        out_cols.append((tail_pivot[c] + 1, None))
    nf = NFCase0(nn, f.typ, tuple(out_cols))
    if check:
        fam = invariant_family(nn, f.typ)
        if signature(nf.realize(F), fam).values != signature(f, fam).values:
            raise AssertionError("case 0 reduction does not preserve the signature")
    return nf


def decode_signature_case0(sig: Signature) -> NFCase0:
    """Rebuild the case-0 normal form from rank differences alone."""
    nn, mm = sig.family.nn, sig.family.mm
    n1, n2 = nn.parts
    n = nn.n
    m1 = mm.parts[0]
    idx = sig.family.index()

    def val(J: tuple[int, ...]) -> int:
        if not J:
            return 0
        return sig.values[idx[(1, J)]]

    def e_suffix(p):  # rows p..n1
        return tuple(range(p, n1 + 1))

    def f_suffix(p):  # rows n1+p..n
        return tuple(range(n1 + p, n + 1))

    s = val(f_suffix(1))
    r = m1 - val(e_suffix(1))
    i_list = [p for p in range(1, n2 + 1)
              if val(f_suffix(p)) - val(f_suffix(p + 1)) == 1]
    j_list = [p for p in range(1, n1 + 1)
              if val(e_suffix(p)) - val(e_suffix(p + 1)) == 1]
    if len(i_list) != s or len(j_list) != m1 - r or not 0 <= r <= s <= m1:
        raise InconsistentSignatureError("rank profile matches no normal form")

    def joint(j, i):
        return tuple(sorted(set(e_suffix(j)) | set(f_suffix(i))))

    pair_of_i: dict[int, int] = {}
    used_j: set[int] = set()
    for i in i_list:
        for j in j_list:
            c1 = val(joint(j, i)) - val(joint(j + 1, i))
            c2 = val(joint(j, i + 1)) - val(joint(j + 1, i + 1))
            if c1 == 0 and c2 == 1:
                if i in pair_of_i or j in used_j:
                    raise InconsistentSignatureError("ambiguous pairing")
                pair_of_i[i] = j
                used_j.add(j)
    if len(pair_of_i) != s - r:
        raise InconsistentSignatureError(
            f"expected {s - r} paired columns, found {len(pair_of_i)}")
    cols: list[tuple[Optional[int], Optional[int]]] = []
    for i in i_list:
        cols.append((pair_of_i.get(i), i))
    for j in sorted(set(j_list) - used_j):
        cols.append((j, None))
    return NFCase0(nn, mm, tuple(cols))


# ---------------------------------------------------------------------------
# case III': Gauss-Jordan without row permutations
# ---------------------------------------------------------------------------


def reduce_case3prime(f: Flag, nn: Composition, check: bool = True) -> NFChain:
    # row predicate, not first-match: pairs matching several table rows
    # must stay reducible by each matching row's reducer
    if len(nn) != 2 or min(nn.parts) != 1:
        raise ValueError(f"pair ({nn}, {f.typ}) is not a one-line-block pair")
    F = f.field
    n = nn.n
    mm = f.typ
    work = f
    swapped = nn.parts[0] == 1 and n > 2
    if swapped:
        rho = _rotation_perm(n)
        work = act(permutation_matrix(F, rho), f)

    l = len(mm)
    stored = n - mm.parts[-1]
    cols = [list(work.rep.column(j)) for j in range(stored)]
    ps = mm.prefix_sums()
    block_of_col = [mm.block_of(c) for c in range(stored)]

    def col_axpy(dst, src, c):
        for i in range(n):
            cols[dst][i] = F.add(cols[dst][i], F.mul(c, cols[src][i]))

    def col_scale(j, c):
        for i in range(n):
            cols[j][i] = F.mul(c, cols[j][i])

    def row_axpy(dst, src, c):
        for j in range(stored):
            cols[j][dst] = F.add(cols[j][dst], F.mul(c, cols[j][src]))

    # locate the pivot block and its distinguished column
    special = None
    for c in range(stored):
        if cols[c][n - 1] != F.zero:
            special = c
            break
    if special is None:
        j0 = l
    else:
        j0 = block_of_col[special] + 1
        col_scale(special, F.inv(cols[special][n - 1]))
        for c in range(stored):
            if c != special and cols[c][n - 1] != F.zero:
                col_axpy(c, special, F.sub(F.zero, cols[c][n - 1]))

    # reduce every non-special column to a distinct basis vector
    finished: dict[int, int] = {}        # column -> pivot row (0-based)
    row_block: dict[int, int] = {}       # pivot row -> 1-based block
    for c in range(stored):
        if c == special:
            continue
        for pc, pr in finished.items():
            if cols[c][pr] != F.zero:
                col_axpy(c, pc, F.sub(F.zero, cols[c][pr]))
        pivot = next((i for i in range(n - 2, -1, -1)
                      if cols[c][i] != F.zero), None)
        if pivot is None:
            raise ValueError("flag representative is rank deficient")
        col_scale(c, F.inv(cols[c][pivot]))
        for i in range(pivot - 1, -1, -1):
            if cols[c][i] != F.zero:
                row_axpy(i, pivot, F.sub(F.zero, cols[c][i]))
        finished[c] = pivot
        row_block[pivot] = block_of_col[c] + 1

    chain: list[tuple[int, int]] = []
    if special is not None:
        # clear the marked rows of blocks up to j0 from the special column
        for pc, pr in finished.items():
            if block_of_col[pc] + 1 <= j0 and cols[special][pr] != F.zero:
                col_axpy(special, pc, F.sub(F.zero, cols[special][pr]))
        support = [i for i in range(n - 1) if cols[special][i] != F.zero]
        # rows unused by stored blocks belong to the dropped block l
        blk = {i: row_block.get(i, l) for i in support}
        best = 0
        for i in sorted(support, reverse=True):
            if blk[i] > best:
                chain.append((blk[i], i + 1))
                best = blk[i]
        chain.sort()

    blocks = []
    for b in range(l - 1):
        rows = sorted(finished[c] + 1 for c in range(stored)
                      if c != special and block_of_col[c] == b)
        blocks.append(tuple(rows))
    nf = NFChain(nn, mm, j0, tuple(blocks), tuple(chain))
    if check:
        fam = invariant_family(nn, mm)
        if signature(nf.realize(F), fam).values != signature(f, fam).values:
            raise AssertionError(
                "pivot-block reduction does not preserve the signature")
    return nf


# ---------------------------------------------------------------------------
# catalog-backed reduction for the remaining separable cases
# ---------------------------------------------------------------------------


def reduce_by_catalog(f: Flag, nn: Composition) -> NormalForm:
    """Signature lookup against the enumerated catalog of the pair."""
    from .orbits import enumerate_orbits  # deferred to avoid a cycle

    tag = classify_pair(nn, f.typ)
    if tag is None:
        raise InfinitePairError(f"pair (nn={nn} | mm={f.typ}) is infinite")
    if not has_catalog(tag):
        raise UnsupportedCaseError(f"case {tag} has no catalog")
    cat = enumerate_orbits(nn, f.typ)
    fam = invariant_family(nn, f.typ)
    values = signature(f, fam).values
    for entry in cat.entries:
        if entry.sig.values == values:
            return entry.nf
    raise CatalogLookupError(
        f"signature of the flag matches no catalog entry of ({nn}, {f.typ}); "
        "this indicates a catalog or invariance bug")


def reduce_flag(f: Flag, nn: Composition, check: bool = True) -> NormalForm:
    """Dispatch to the case's reducer; raises on infinite or witness cases."""
    tag = classify_pair(nn, f.typ)
    if tag is None:
        raise InfinitePairError(f"pair ({nn}, {f.typ}) is infinite")
    if tag.label == "0":
        return reduce_case0(f, nn, check=check)
    if tag.label == "III'":
        return reduce_case3prime(f, nn, check=check)
    if not tag.injective:
        raise NonInjectiveError(
            f"case {tag} does not separate orbits by signature",
            witnesses=None)
    return reduce_by_catalog(f, nn)


# ---------------------------------------------------------------------------
# catalog generators (normal form lists per case)
# ---------------------------------------------------------------------------


def case0_normal_forms(nn: Composition, mm: Composition) -> list[NFCase0]:
    """All two-block normal forms: choose the carried f-rows, a paired
    subset with injectively assigned e-rows, and a sorted pure-e tail."""
    n1, n2 = nn.parts
    m1 = mm.parts[0]
    out = []
    for s in range(0, min(m1, n2) + 1):
        tail_len = m1 - s
        for i_set in itertools.combinations(range(1, n2 + 1), s):
            for paired in _subsets(i_set):
                free_e = n1 - len(paired)
                if tail_len > free_e:
                    continue
                for j_assign in itertools.permutations(
                        range(1, n1 + 1), len(paired)):
                    used = set(j_assign)
                    rest = [j for j in range(1, n1 + 1) if j not in used]
                    for tail in itertools.combinations(rest, tail_len):
                        cols: list[tuple[Optional[int], Optional[int]]] = []
                        pair_map = dict(zip(paired, j_assign))
                        for i in i_set:
                            cols.append((pair_map.get(i), i))
                        for e in tail:
                            cols.append((e, None))
                        out.append(NFCase0(nn, mm, tuple(cols)))
    return out


def _subsets(items):
    for k in range(len(items) + 1):
        yield from itertools.combinations(items, k)


def case3prime_normal_forms(nn: Composition, mm: Composition) -> list[NFChain]:
    """All pivot-block/chain normal forms for the one-line-block case."""
    n = nn.n
    l = len(mm)
    out = []
    rows = list(range(1, n))
    for j0 in range(1, l + 1):
        sizes = [mm.parts[b] - (1 if b + 1 == j0 else 0) for b in range(l)]
        chain_blocks_options = []
        later = list(range(j0 + 1, l + 1))
        for k in range(0, len(later) + 1):
            chain_blocks_options.extend(itertools.combinations(later, k))
        for chain_blocks in chain_blocks_options:
            adj = list(sizes)
            for jb in chain_blocks:
                adj[jb - 1] -= 1
            if any(a < 0 for a in adj):
                continue
            k = len(chain_blocks)
            for marked in itertools.combinations(rows, k):
                # decreasing values across increasing blocks
                chain = tuple(zip(chain_blocks, sorted(marked, reverse=True)))
                for assignment in _distributions(
                        [r for r in rows if r not in marked], adj):
                    blocks = []
                    for b in range(l - 1):
                        block_rows = list(assignment[b])
                        if b + 1 in chain_blocks:
                            block_rows.append(dict(chain)[b + 1])
                        blocks.append(tuple(sorted(block_rows)))
                    out.append(NFChain(nn, mm, j0, tuple(blocks), chain))
    return out


def _distributions(items: list[int], sizes: list[int]):
    """All ways to split ``items`` into disjoint sets of the given sizes."""
    if sum(sizes) != len(items):
        return
    if not sizes:
        yield ()
        return
    first, rest = sizes[0], sizes[1:]
    for chosen in itertools.combinations(items, first):
        remaining = [x for x in items if x not in chosen]
        for tail in _distributions(remaining, rest):
            yield (chosen,) + tail


def _bit_vectors(length: int):
    return itertools.product((0, 1), repeat=length)


def pattern_candidates(tag: CaseTag, nn: Composition,
                       mm: Composition) -> list[NFPattern]:
    """Over-generate 0/1 representatives for the signature-lookup cases.

    The lists cover every orbit (they include all shapes of the case's
    classification); redundancy is harmless because the caller collapses
    equal signatures.
    """
    n = nn.n
    if tag.label == "III":
        primal_mm = Composition.of(1, n - 1)
        dualize = tag.subcase == "(n-1,1)" and n > 2
        cands = []
        for bits in _bit_vectors(n):
            if not any(bits):
                continue
            cands.append(NFPattern("III", tag.subcase, nn, mm, primal_mm,
                                   tuple((b,) for b in bits),
                                   dualize=dualize))
        return cands

    if tag.label == "II":
        primal_mm = Composition.of(2, n - 2)
        dualize = tag.subcase == "(n-2,2)"
        cands = []
        for u in _bit_vectors(n):
            if not any(u):
                continue
            for v in _bit_vectors(n):
                if not any(v) or u == v:
                    continue
                rowsm = tuple((a, b) for a, b in zip(u, v))
                cands.append(NFPattern("II", tag.subcase, nn, mm, primal_mm,
                                       rowsm, dualize=dualize))
        return cands

    if tag.label == "I":
        rho, canon_nn = _case1_row_perm(nn)
        n2, n3 = canon_nn.parts[1], canon_nn.parts[2]
        sub_nn = Composition.of(n2, n3)
        m1 = mm.parts[0]
        cands = []
        # orbits missing the scalar row entirely
        if m1 <= n - 1:
            for nf in case0_normal_forms(sub_nn,
                                         Composition.of(m1, n - 1 - m1)):
                sub = nf.realize(QQ).rep
                rowsm = ((0,) * m1,) + tuple(
                    tuple(int(x) for x in row) for row in sub.data)
                cands.append(NFPattern("I", tag.subcase, nn, mm, mm,
                                       rowsm, row_perm=rho))
        # orbits meeting the scalar row: a distinguished first column
        tail_mm = None if m1 == 1 else Composition.of(m1 - 1, n - m1)
        base_forms = [None] if tail_mm is None else \
            case0_normal_forms(sub_nn, tail_mm)
        for base in base_forms:
            base_cols = [] if base is None else \
                [list(c) for c in zip(*(base.realize(QQ).rep.data))]
            for u in _bit_vectors(n2):
                for v in _bit_vectors(n3):
                    col1 = [1] + list(u) + list(v)
                    allcols = [col1] + [[0] + [int(x) for x in col]
                                        for col in base_cols]
                    rowsm = tuple(zip(*allcols))
                    cands.append(NFPattern("I", tag.subcase, nn, mm, mm,
                                           tuple(tuple(r) for r in rowsm),
                                           row_perm=rho))
        return cands

    if tag.label == "I'" and tag.subcase == "m2=1":
        n1, n2 = nn.parts
        m1 = mm.parts[0]
        cands = []
        for base in case0_normal_forms(nn, Composition.of(m1, n - m1)):
            base_mat = base.realize(QQ).rep
            base_cols = [[int(x) for x in base_mat.column(j)]
                         for j in range(m1)]
            for u in _bit_vectors(n1):
                for v in _bit_vectors(n2):
                    extra = list(u) + list(v)
                    if not any(extra):
                        continue
                    allcols = base_cols + [extra]
                    mat = Matrix.from_rows(
                        QQ, [[c[i] for c in allcols] for i in range(n)])
                    if mat.rank() != m1 + 1:
                        continue
                    rowsm = tuple(tuple(int(x) for x in row)
                                  for row in mat.data)
                    cands.append(NFPattern("I'", tag.subcase, nn, mm, mm,
                                           rowsm))
        return cands

    raise UnsupportedCaseError(f"no pattern generator for case {tag}")


# ---------------------------------------------------------------------------
# non-injectivity witnesses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WitnessPair:
    d1: Flag
    d2: Flag
    case: CaseTag
    nn: Composition
    mm: Composition


_W_I_PRIME_M1 = (
    ((0, 1, 0), (0, 0, 1), (1, 0, 0), (0, 0, 1), (1, 1, 0)),
    ((0, 1, 0), (0, 0, 1), (1, 0, 0), (0, 1, 1), (1, 1, 0)),
)
_W_I_PRIME_M3 = (
    ((1, 0, 0), (0, 0, 1), (0, 1, 0), (1, 1, 0), (0, 0, 1)),
    ((1, 0, 0), (0, 0, 1), (0, 1, 0), (1, 1, 0), (0, 1, 1)),
)
_W_II_PRIME = (
    ((1, 0, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1),
     (0, 1, 0, 0), (0, 0, 0, 1), (0, 1, 1, 0)),
    ((1, 0, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1),
     (0, 1, 0, 0), (0, 0, 1, 1), (0, 1, 1, 0)),
)


def counterexample_pair(nn: Composition, mm: Composition,
                        verify: bool = True) -> WitnessPair:
    """Two flags with identical signatures lying in different orbits.

    Supported shapes: the minimal non-injective configurations
    ((3,2)/(1,2,2), (3,2)/(2,2,1) through the orthogonal swap, and
    (4,2)/(2,2,2)).  The pair is checked on construction: exact signature
    equality and emptiness of the GF(2) transporter.
    """
    tag = classify_pair(nn, mm)
    if tag is None:
        raise InfinitePairError(f"pair ({nn}, {mm}) is infinite")
    if tag.injective:
        raise ValueError(f"case {tag} separates orbits; no witnesses exist")

    if tag.label == "I'" and tag.subcase == "m1=1" \
            and nn.parts == (3, 2) and mm.parts == (1, 2, 2):
        flags = [Flag.from_matrix(mm, Matrix.from_rows(QQ, rows))
                 for rows in _W_I_PRIME_M1]
    elif tag.label == "I'" and tag.subcase == "m3=1" \
            and nn.parts == (3, 2) and mm.parts == (2, 2, 1):
        src = Composition.of(1, 2, 2)
        flags = [dual(Flag.from_matrix(src, Matrix.from_rows(QQ, rows)))
                 for rows in _W_I_PRIME_M3]
    elif tag.label == "II'" and nn.parts == (4, 2) and mm.parts == (2, 2, 2):
        flags = [Flag.from_matrix(mm, Matrix.from_rows(QQ, rows))
                 for rows in _W_II_PRIME]
    else:
        raise UnsupportedCaseError(
            f"no witness construction implemented for ({nn}, {mm})")

    pair = WitnessPair(flags[0], flags[1], tag, nn, mm)
    if verify:
        fam = invariant_family(nn, mm)
        s1 = signature(pair.d1, fam)
        s2 = signature(pair.d2, fam)
        if s1.values != s2.values:
            raise AssertionError("witness flags have different signatures")
        if not transporter_empty(pair, 2):
            raise AssertionError("witness flags lie in the same GF(2) orbit")
    return pair


def witness_pair_over(nn: Composition, mm: Composition,
                      q: int) -> tuple[Flag, Flag]:
    """The witness flags rebuilt intrinsically over GF(q)."""
    fld = gf(q)
    if nn.parts == (3, 2) and mm.parts == (1, 2, 2):
        return tuple(Flag.from_matrix(mm, Matrix.from_rows(fld, rows))
                     for rows in _W_I_PRIME_M1)
    if nn.parts == (3, 2) and mm.parts == (2, 2, 1):
        src = Composition.of(1, 2, 2)
        return tuple(dual(Flag.from_matrix(src, Matrix.from_rows(fld, rows)))
                     for rows in _W_I_PRIME_M3)
    if nn.parts == (4, 2) and mm.parts == (2, 2, 2):
        return tuple(Flag.from_matrix(mm, Matrix.from_rows(fld, rows))
                     for rows in _W_II_PRIME)
    raise UnsupportedCaseError(f"no witnesses for ({nn}, {mm})")


def transporter_empty(pair: WitnessPair, q: int) -> bool:
    """Brute-force check that no GF(q) block-Borel element moves d1 to d2."""
    d1, d2 = witness_pair_over(pair.nn, pair.mm, q)
    for b in borel_elements(pair.nn, q):
        if flags_equal(act(b, d1), d2):
            return False
    return True


def borel_elements(nn: Composition, q: int, limit: int = 2_000_000):
    """Iterate every element of the block Borel over GF(q)."""
    fld = gf(q)
    n = nn.n
    positions = [(i, j) for b in range(len(nn))
                 for i in nn.block_range(b) for j in nn.block_range(b)
                 if i < j]
    diag_slots = list(range(n))
    nonzero = list(range(1, q))
    count = (q - 1) ** n * q ** len(positions)
    if count > limit:
        raise ValueError(f"group order {count} exceeds the iteration limit")
    for diag in itertools.product(nonzero, repeat=n):
        for vals in itertools.product(range(q), repeat=len(positions)):
            rows = [[0] * n for _ in range(n)]
            for i, d in zip(diag_slots, diag):
                rows[i][i] = d
            for (i, j), v in zip(positions, vals):
                rows[i][j] = v
            yield Matrix.from_rows(fld, rows)
