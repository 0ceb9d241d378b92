"""Exact dense linear algebra over a prime field F_p or the rationals.

Everything in the package funnels its linear algebra through this module so
that determinism is decided in one place: reduced row echelon form with the
pivot list, solving with free variables pinned to zero, and kernel bases read
off the echelon form in free-column order.  No floating point anywhere.
"""

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple


class Field:
    """A coefficient field, either F_p (p prime) or Q.

    Elements of F_p are ints in [0, p); elements of Q are Fraction.  The
    class only carries the arithmetic, values are plain Python objects.
    """

    def __init__(self, p: Optional[int] = None):
        if p is not None:
            if p < 2 or any(p % d == 0 for d in range(2, min(p, 1000)) if d * d <= p):
                raise ValueError(f"modulus {p} is not prime")
        self.p = p

    @classmethod
    def prime(cls, p: int) -> "Field":
        return cls(p)

    @classmethod
    def rationals(cls) -> "Field":
        return cls(None)

    @property
    def is_prime_field(self) -> bool:
        return self.p is not None

    def zero(self):
        return 0 if self.p is not None else Fraction(0)

    def one(self):
        return 1 if self.p is not None else Fraction(1)

    def of(self, n) -> object:
        """Coerce an int (or Fraction, over Q) into the field."""
        if self.p is not None:
            return int(n) % self.p
        return Fraction(n)

    def add(self, a, b):
        return (a + b) % self.p if self.p is not None else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.p is not None else a - b

    def mul(self, a, b):
        return (a * b) % self.p if self.p is not None else a * b

    def neg(self, a):
        return (-a) % self.p if self.p is not None else -a

    def inv(self, a):
        if self.p is not None:
            if a % self.p == 0:
                raise ZeroDivisionError("inverse of zero")
            return pow(a, self.p - 2, self.p)
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return Fraction(1) / a

    def random(self, rng) -> object:
        if self.p is not None:
            return rng.randrange(self.p)
        return Fraction(rng.randrange(-4, 5))

    def __eq__(self, other):
        return isinstance(other, Field) and self.p == other.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return f"F_{self.p}" if self.p is not None else "Q"


class Mat:
    """An immutable rows x cols matrix over a Field, entries row major.

    Zero rows or columns are legal; empty matrices show up constantly as
    hom spaces of zero modules and must compose cleanly.
    """

    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, field: Field, rows: int, cols: int, data: Sequence):
        if rows < 0 or cols < 0:
            raise ValueError("negative matrix dimensions")
        if len(data) != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, got {len(data)}")
        self.field = field
        self.rows = rows
        self.cols = cols
        self.data = tuple(data)

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> "Mat":
        return cls(field, rows, cols, [field.zero()] * (rows * cols))

    @classmethod
    def identity(cls, field: Field, n: int) -> "Mat":
        z, o = field.zero(), field.one()
        return cls(field, n, n, [o if i == j else z for i in range(n) for j in range(n)])

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence]) -> "Mat":
        r = len(rows)
        c = len(rows[0]) if r else 0
        flat = []
        for row in rows:
            if len(row) != c:
                raise ValueError("ragged rows")
            flat.extend(field.of(x) for x in row)
        return cls(field, r, c, flat)

    @classmethod
    def column(cls, field: Field, entries: Sequence) -> "Mat":
        return cls(field, len(entries), 1, [field.of(x) for x in entries])

    def at(self, i: int, j: int):
        return self.data[i * self.cols + j]

    def row(self, i: int) -> Tuple:
        return self.data[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> Tuple:
        return tuple(self.data[i * self.cols + j] for i in range(self.rows))

    def to_lists(self) -> List[List]:
        return [list(self.row(i)) for i in range(self.rows)]

    def is_zero(self) -> bool:
        z = self.field.zero()
        return all(x == z for x in self.data)

    def __eq__(self, other):
        return (isinstance(other, Mat) and self.field == other.field
                and self.rows == other.rows and self.cols == other.cols
                and self.data == other.data)

    def __hash__(self):
        return hash((self.rows, self.cols, self.data))

    def __repr__(self):
        return f"Mat({self.rows}x{self.cols} over {self.field})"

    def __add__(self, other: "Mat") -> "Mat":
        self._check_same_shape(other)
        add = self.field.add
        return Mat(self.field, self.rows, self.cols,
                   [add(a, b) for a, b in zip(self.data, other.data)])

    def __sub__(self, other: "Mat") -> "Mat":
        self._check_same_shape(other)
        sub = self.field.sub
        return Mat(self.field, self.rows, self.cols,
                   [sub(a, b) for a, b in zip(self.data, other.data)])

    def __neg__(self) -> "Mat":
        neg = self.field.neg
        return Mat(self.field, self.rows, self.cols, [neg(a) for a in self.data])

    def scale(self, c) -> "Mat":
        mul = self.field.mul
        c = self.field.of(c) if isinstance(c, int) else c
        return Mat(self.field, self.rows, self.cols, [mul(c, a) for a in self.data])

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.field != other.field:
            raise ValueError("field mismatch")
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        f = self.field
        z = f.zero()
        n, m, k = self.rows, other.cols, self.cols
        out = [z] * (n * m)
        if f.p is not None:
            p = f.p
            for i in range(n):
                arow = self.data[i * k:(i + 1) * k]
                for j in range(m):
                    s = 0
                    for t in range(k):
                        s += arow[t] * other.data[t * m + j]
                    out[i * m + j] = s % p
        else:
            for i in range(n):
                arow = self.data[i * k:(i + 1) * k]
                for j in range(m):
                    s = Fraction(0)
                    for t in range(k):
                        s += arow[t] * other.data[t * m + j]
                    out[i * m + j] = s
        return Mat(f, n, m, out)

    def transpose(self) -> "Mat":
        return Mat(self.field, self.cols, self.rows,
                   [self.data[i * self.cols + j]
                    for j in range(self.cols) for i in range(self.rows)])

    def _check_same_shape(self, other: "Mat"):
        if self.field != other.field or self.rows != other.rows or self.cols != other.cols:
            raise ValueError("shape or field mismatch")

    def rref(self) -> Tuple["Mat", Tuple[int, ...]]:
        """Reduced row echelon form and the tuple of pivot column indices.

        Leading entries are 1 and are the only nonzero entries in their
        columns.  Deterministic: pivots are chosen top-down by first nonzero
        entry in column order.
        """
        f = self.field
        m = self.to_lists()
        rows, cols = self.rows, self.cols
        pivots = []
        r = 0
        for j in range(cols):
            sel = None
            for i in range(r, rows):
                if m[i][j] != f.zero():
                    sel = i
                    break
            if sel is None:
                continue
            m[r], m[sel] = m[sel], m[r]
            inv = f.inv(m[r][j])
            m[r] = [f.mul(inv, x) for x in m[r]]
            for i in range(rows):
                if i != r and m[i][j] != f.zero():
                    c = m[i][j]
                    m[i] = [f.sub(x, f.mul(c, y)) for x, y in zip(m[i], m[r])]
            pivots.append(j)
            r += 1
            if r == rows:
                break
        flat = [x for row in m for x in row]
        return Mat(f, rows, cols, flat), tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel_basis(self) -> "Mat":
        """Columns form the canonical basis of the right null space.

        Read off the rref: one basis vector per free column, with 1 in the
        free slot and minus the rref entries in the pivot slots, ordered by
        free column index.
        """
        f = self.field
        R, pivots = self.rref()
        pivset = set(pivots)
        free = [j for j in range(self.cols) if j not in pivset]
        z, o = f.zero(), f.one()
        cols = []
        for fc in free:
            v = [z] * self.cols
            v[fc] = o
            for i, pc in enumerate(pivots):
                v[pc] = f.neg(R.at(i, fc))
            cols.append(v)
        flat = [cols[j][i] for i in range(self.cols) for j in range(len(free))]
        return Mat(f, self.cols, len(free), flat)

    def column_space_basis(self) -> Tuple["Mat", Tuple[int, ...]]:
        """Pivot columns of the original matrix, plus their indices."""
        _, pivots = self.rref()
        f = self.field
        flat = [self.at(i, j) for i in range(self.rows) for j in pivots]
        return Mat(f, self.rows, len(pivots), flat), pivots

    def inverse(self) -> Optional["Mat"]:
        if self.rows != self.cols:
            return None
        x = solve(self, Mat.identity(self.field, self.rows))
        if x is None:
            return None
        if (self @ x) != Mat.identity(self.field, self.rows):
            return None
        if (x @ self) != Mat.identity(self.field, self.rows):
            return None
        return x


def solve(a: Mat, b: Mat) -> Optional[Mat]:
    """Solve a @ x = b exactly, multi column rhs; None if inconsistent.

    Among all solutions returns the canonical one with every free variable
    equal to zero.
    """
    if a.field != b.field or a.rows != b.rows:
        raise ValueError("incompatible solve operands")
    f = a.field
    aug = hstack([a, b])
    R, pivots = aug.rref()
    for j in pivots:
        if j >= a.cols:
            return None
    z = f.zero()
    out = [[z] * b.cols for _ in range(a.cols)]
    for i, pc in enumerate(pivots):
        for j in range(b.cols):
            out[pc][j] = R.at(i, a.cols + j)
    return Mat(f, a.cols, b.cols, [x for row in out for x in row])


def hstack(mats: Sequence[Mat]) -> Mat:
    if not mats:
        raise ValueError("hstack of nothing")
    f = mats[0].field
    rows = mats[0].rows
    if any(m.rows != rows or m.field != f for m in mats):
        raise ValueError("hstack row or field mismatch")
    flat = []
    for i in range(rows):
        for m in mats:
            flat.extend(m.row(i))
    return Mat(f, rows, sum(m.cols for m in mats), flat)


def vstack(mats: Sequence[Mat]) -> Mat:
    if not mats:
        raise ValueError("vstack of nothing")
    f = mats[0].field
    cols = mats[0].cols
    if any(m.cols != cols or m.field != f for m in mats):
        raise ValueError("vstack column or field mismatch")
    flat = []
    for m in mats:
        flat.extend(m.data)
    return Mat(f, sum(m.rows for m in mats), cols, flat)


def block_diag(field: Field, mats: Sequence[Mat]) -> Mat:
    rows = sum(m.rows for m in mats)
    cols = sum(m.cols for m in mats)
    z = field.zero()
    out = [[z] * cols for _ in range(rows)]
    r0 = c0 = 0
    for m in mats:
        if m.field != field:
            raise ValueError("field mismatch")
        for i in range(m.rows):
            row = m.row(i)
            out[r0 + i][c0:c0 + m.cols] = list(row)
        r0 += m.rows
        c0 += m.cols
    return Mat(field, rows, cols, [x for row in out for x in row])


def block_matrix(field: Field, blocks: Sequence[Sequence[Mat]]) -> Mat:
    """Assemble from a grid of blocks; each grid row is hstacked, then vstacked."""
    return vstack([hstack(list(row)) for row in blocks])


def kron(a: Mat, b: Mat) -> Mat:
    """Kronecker product, (a kron b)[i*br+k, j*bc+l] = a[i,j] * b[k,l]."""
    if a.field != b.field:
        raise ValueError("field mismatch")
    f = a.field
    mul = f.mul
    rows, cols = a.rows * b.rows, a.cols * b.cols
    out = [f.zero()] * (rows * cols)
    for i in range(a.rows):
        for j in range(a.cols):
            aij = a.at(i, j)
            for k in range(b.rows):
                base = (i * b.rows + k) * cols + j * b.cols
                for l in range(b.cols):
                    out[base + l] = mul(aij, b.at(k, l))
    return Mat(f, rows, cols, out)
