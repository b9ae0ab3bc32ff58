"""Exact dense linear algebra over the rationals and prime fields.

Everything downstream (flags, rank invariants, orbit catalogs, the
finite-field oracle) rests on exact rank computations, so this module
offers two scalar domains and nothing else:

* ``QQ`` -- arbitrary-precision rationals via :class:`fractions.Fraction`,
* ``GF(p)`` -- canonical residues ``0..p-1`` for a prime ``p < 2**31``,
  with inverses by Fermat's little theorem.

Matrices are immutable row-major tuples.  The reduced column echelon
form uses one fixed convention (pivot = first nonzero row scanning top
to bottom, pivots scaled to 1, pivot rows cleared in the other columns)
so canonical representatives are bit-stable across runs.  No floating
point is used anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Scalar = Union[int, Fraction]


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class Field:
    """Scalar domain tag: the rationals or a prime field."""

    name: str

    def coerce(self, x) -> Scalar:
        raise NotImplementedError

    def inv(self, x: Scalar) -> Scalar:
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    @property
    def zero(self) -> Scalar:
        raise NotImplementedError

    @property
    def one(self) -> Scalar:
        raise NotImplementedError

    def parse(self, token: str) -> Scalar:
        raise NotImplementedError

    def format(self, x: Scalar) -> str:
        return str(x)


class _RationalField(Field):
    name = "Q"

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        raise TypeError(f"cannot coerce {x!r} into Q")

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of 0 in Q")
        return 1 / Fraction(x)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def parse(self, token):
        return Fraction(token)

    def format(self, x):
        return str(Fraction(x))

    def __repr__(self):
        return "QQ"


class GF(Field):
    """Prime field GF(p); elements are canonical residues in [0, p)."""

    def __init__(self, p: int):
        if not _is_prime(p) or p >= 2**31:
            raise ValueError(f"GF({p}): p must be a prime below 2**31")
        self.p = p
        self.name = f"F{p}"

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def coerce(self, x):
        if isinstance(x, int):
            return x % self.p
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"denominator divisible by {self.p}")
            return x.numerator * pow(x.denominator, self.p - 2, self.p) % self.p
        raise TypeError(f"cannot coerce {x!r} into GF({self.p})")

    def inv(self, x):
        x %= self.p
        if x == 0:
            raise ZeroDivisionError(f"inverse of 0 in GF({self.p})")
        return pow(x, self.p - 2, self.p)

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def parse(self, token):
        return int(token) % self.p

    def __eq__(self, other):
        return isinstance(other, GF) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return f"GF({self.p})"


QQ = _RationalField()

_FIELD_CACHE: dict[int, GF] = {}


def gf(p: int) -> GF:
    if p not in _FIELD_CACHE:
        _FIELD_CACHE[p] = GF(p)
    return _FIELD_CACHE[p]


def field_by_name(name: str) -> Field:
    if name == "Q":
        return QQ
    if name.startswith("F"):
        return gf(int(name[1:]))
    raise ValueError(f"unknown field tag {name!r}")


@dataclass(frozen=True)
class Matrix:
    """Immutable dense matrix with a uniform scalar field."""

    field: Field
    rows: int
    cols: int
    data: tuple  # row-major tuple of row tuples

    # -- construction -------------------------------------------------

    @staticmethod
    def from_rows(field: Field, rows: Sequence[Sequence]) -> "Matrix":
        coerced = tuple(tuple(field.coerce(x) for x in row) for row in rows)
        ncols = len(coerced[0]) if coerced else 0
        if any(len(r) != ncols for r in coerced):
            raise ValueError("ragged rows")
        return Matrix(field, len(coerced), ncols, coerced)

    @staticmethod
    def zero(field: Field, rows: int, cols: int) -> "Matrix":
        z = field.zero
        return Matrix(field, rows, cols, tuple((z,) * cols for _ in range(rows)))

    @staticmethod
    def identity(field: Field, n: int) -> "Matrix":
        z, o = field.zero, field.one
        return Matrix(
            field, n, n,
            tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)),
        )

    @staticmethod
    def from_columns(field: Field, cols: Sequence[Sequence]) -> "Matrix":
        if not cols:
            raise ValueError("need at least one column; use Matrix.zero for empty")
        nrows = len(cols[0])
        rows = [[field.coerce(c[i]) for c in cols] for i in range(nrows)]
        return Matrix.from_rows(field, rows)

    # -- basic shape ops ----------------------------------------------

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.data)

    def columns(self) -> list[tuple]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "Matrix":
        return Matrix(
            self.field, self.cols, self.rows,
            tuple(tuple(self.data[i][j] for i in range(self.rows))
                  for j in range(self.cols)),
        )

    def row_submatrix(self, rows: Iterable[int]) -> "Matrix":
        rows = list(rows)
        return Matrix(self.field, len(rows), self.cols,
                      tuple(self.data[i] for i in rows))

    def col_submatrix(self, cols: Iterable[int]) -> "Matrix":
        cols = list(cols)
        return Matrix(self.field, self.rows, len(cols),
                      tuple(tuple(row[j] for j in cols) for row in self.data))

    def hstack(self, other: "Matrix") -> "Matrix":
        if other.rows != self.rows or other.field != self.field:
            raise ValueError("hstack: incompatible shapes or fields")
        return Matrix(self.field, self.rows, self.cols + other.cols,
                      tuple(a + b for a, b in zip(self.data, other.data)))

    # -- arithmetic ----------------------------------------------------

    def __mul__(self, other: "Matrix") -> "Matrix":
        if self.field != other.field:
            raise ValueError("mixed-field product")
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} * "
                             f"{other.rows}x{other.cols}")
        F = self.field
        ot = other.transpose().data
        out = tuple(
            tuple(_dot(F, row, col) for col in ot) for row in self.data
        )
        return Matrix(F, self.rows, other.cols, out)

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.field, self.rows, self.cols) != (other.field, other.rows, other.cols):
            raise ValueError("shape or field mismatch")
        F = self.field
        return Matrix(self.field, self.rows, self.cols,
                      tuple(tuple(F.add(a, b) for a, b in zip(ra, rb))
                            for ra, rb in zip(self.data, other.data)))

    def __neg__(self) -> "Matrix":
        F = self.field
        return Matrix(self.field, self.rows, self.cols,
                      tuple(tuple(F.sub(F.zero, a) for a in row)
                            for row in self.data))

    def scale(self, c) -> "Matrix":
        F = self.field
        c = F.coerce(c)
        return Matrix(self.field, self.rows, self.cols,
                      tuple(tuple(F.mul(c, a) for a in row) for row in self.data))

    def is_zero(self) -> bool:
        z = self.field.zero
        return all(a == z for row in self.data for a in row)

    # -- rank / echelon / kernel ----------------------------------------

    def rank(self) -> int:
        return _row_reduce([list(r) for r in self.data], self.field)[1]

    def reduced_column_echelon(self) -> "Matrix":
        """Unique reduced column echelon form; column span is preserved.

        Convention: columns are produced in increasing order of pivot row,
        each pivot (the first nonzero row of its column, scanning top to
        bottom) is scaled to 1 and cleared from every other column.
        Dependent columns collapse to zero columns, which are kept at the
        right so the shape is unchanged.
        """
        reduced, rank = _row_reduce(
            [list(r) for r in self.transpose().data], self.field)
        z = self.field.zero
        pad = [[z] * self.rows for _ in range(self.cols - rank)]
        cols = reduced[:rank] + pad
        return Matrix(self.field, self.cols, self.rows, tuple(tuple(r) for r in cols)).transpose()

    def kernel_basis(self) -> "Matrix":
        """Columns form a basis of the right null space."""
        F = self.field
        reduced, rank = _row_reduce([list(r) for r in self.data], F)
        pivots = []
        for r in range(rank):
            row = reduced[r]
            pivots.append(next(j for j, a in enumerate(row) if a != F.zero))
        free = [j for j in range(self.cols) if j not in pivots]
        basis = []
        for j in free:
            v = [F.zero] * self.cols
            v[j] = F.one
            for r, pj in enumerate(pivots):
                v[pj] = F.sub(F.zero, reduced[r][j])
            basis.append(v)
        if not basis:
            return Matrix.zero(F, self.cols, 0)
        return Matrix.from_columns(F, basis)

    def inverse(self) -> "Matrix":
        if self.rows != self.cols:
            raise ValueError("inverse of non-square matrix")
        F = self.field
        n = self.rows
        aug = [list(self.data[i]) + [F.one if j == i else F.zero for j in range(n)]
               for i in range(n)]
        reduced, rank = _row_reduce(aug, F, pivot_cols=n)
        if rank != n:
            raise ValueError("matrix is singular")
        return Matrix(F, n, n, tuple(tuple(reduced[i][n:]) for i in range(n)))

    def is_invertible(self) -> bool:
        return self.rows == self.cols and self.rank() == self.rows

    # -- serialization ---------------------------------------------------

    def to_literal(self) -> str:
        F = self.field
        head = f"{self.rows} {self.cols} {F.name}"
        body = "\n".join(" ".join(F.format(a) for a in row) for row in self.data)
        return head + "\n" + body if self.rows and self.cols else head

    def __str__(self):
        return self.to_literal()


def _dot(F: Field, u, v):
    acc = F.zero
    for a, b in zip(u, v):
        if a != F.zero and b != F.zero:
            acc = F.add(acc, F.mul(a, b))
    return acc


def _row_reduce(rows: list[list], F: Field, pivot_cols: int | None = None):
    """In-place RREF with first-nonzero pivots; returns (rows, rank).

    Only the first ``pivot_cols`` columns are eligible for pivots; row
    operations always span the full width (used for augmented solves).
    """
    if not rows:
        return rows, 0
    ncols = len(rows[0])
    if pivot_cols is None:
        pivot_cols = ncols
    rank = 0
    for col in range(pivot_cols):
        pivot = None
        for r in range(rank, len(rows)):
            if rows[r][col] != F.zero:
                pivot = r
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = F.inv(rows[rank][col])
        if inv != F.one:
            rows[rank] = [F.mul(inv, a) for a in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != F.zero:
                c = rows[r][col]
                rows[r] = [F.sub(a, F.mul(c, b))
                           for a, b in zip(rows[r], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rows, rank


def integer_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank of an integer matrix over Q by fraction-free (Bareiss) elimination.

    Much faster than Fraction arithmetic for the 0/1 matrices that normal
    forms produce; all intermediates stay integral.
    """
    m = [list(r) for r in rows]
    if not m or not m[0]:
        return 0
    nrows, ncols = len(m), len(m[0])
    rank = 0
    prev = 1
    for col in range(ncols):
        pivot = None
        for r in range(rank, nrows):
            if m[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        pv = m[rank][col]
        for r in range(rank + 1, nrows):
            mr = m[r]
            mp = m[rank]
            f = mr[col]
            # the two-term update must hit every remaining row to keep
            # the divisions exact, even when f is zero
            for c in range(col + 1, ncols):
                mr[c] = (pv * mr[c] - f * mp[c]) // prev
            mr[col] = 0
        prev = pv
        rank += 1
        if rank == nrows:
            break
    return rank


def subspace_intersection(a: Matrix, b: Matrix) -> Matrix:
    """Basis of the intersection of the two column spans.

    Requires equal row counts and independent columns in each argument.
    """
    if a.rows != b.rows or a.field != b.field:
        raise ValueError("subspace_intersection: dimension or field mismatch")
    if a.cols == 0 or b.cols == 0:
        return Matrix.zero(a.field, a.rows, 0)
    joint = a.hstack(-b)
    ker = joint.kernel_basis()
    if ker.cols == 0:
        return Matrix.zero(a.field, a.rows, 0)
    u_part = ker.row_submatrix(range(a.cols))
    inter = a * u_part
    reduced = inter.reduced_column_echelon()
    # drop the zero columns introduced by dependent kernel vectors
    keep = [j for j in range(reduced.cols)
            if any(reduced[i, j] != a.field.zero for i in range(reduced.rows))]
    return reduced.col_submatrix(keep)


def parse_matrix_literal(text: str) -> Matrix:
    """Parse the plain-text matrix format: ``rows cols field`` then entries.

    The field tag is ``Q`` or ``Fp`` (e.g. ``F5``); entries are integers or
    ``a/b`` fractions, whitespace-separated, with ``|`` separators ignored.
    """
    tokens = text.replace("|", " ").split()
    if len(tokens) < 3:
        raise ValueError("matrix literal needs a 'rows cols field' header")
    rows, cols = int(tokens[0]), int(tokens[1])
    F = field_by_name(tokens[2])
    entries = tokens[3:]
    if len(entries) != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, got {len(entries)}")
    data = [[F.parse(entries[i * cols + j]) for j in range(cols)]
            for i in range(rows)]
    return Matrix.from_rows(F, data)
