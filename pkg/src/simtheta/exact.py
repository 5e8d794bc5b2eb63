"""Exact arithmetic over Q and a quadratic extension Q(delta), with dense
linear algebra over either field.

F-elements are plain ``fractions.Fraction``.  E-elements are ``QuadExt``
values a + b*delta with delta**2 = Delta.  Matrices carry their field and
never round.  Dense loops over F run on gmpy2 rationals internally and hand
back Fractions.
"""

from __future__ import annotations

from fractions import Fraction

from gmpy2 import mpq


_MPQ_ZERO = mpq(0)
_ZERO = Fraction(0)


def to_mpq_rows(rows):
    z = _MPQ_ZERO
    return [[mpq(x.numerator, x.denominator) if x else z for x in r] for r in rows]


def to_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator)) if x else _ZERO


def to_fraction_rows(rows):
    z = _ZERO
    return [[Fraction(int(x.numerator), int(x.denominator)) if x else z for x in r] for r in rows]


class SingularMatrix(ArithmeticError):
    pass


class ShapeMismatch(ValueError):
    pass


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, QuadExt):
        if x.b:
            raise ValueError(f"{x} does not lie in the base field")
        return x.a
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


class QuadExt:
    """Element a + b*delta of E = F(delta), delta**2 = Delta."""

    __slots__ = ("a", "b", "delta")

    def __init__(self, a, b=0, delta=None):
        if delta is None:
            raise ValueError("QuadExt needs the ambient Delta")
        self.a = as_fraction(a)
        self.b = as_fraction(b)
        self.delta = as_fraction(delta)

    def _coerce(self, other):
        if isinstance(other, QuadExt):
            if other.delta != self.delta:
                raise ValueError("mixing elements of different extensions")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadExt(other, 0, self.delta)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QuadExt(self.a + other.a, self.b + other.b, self.delta)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QuadExt(self.a - other.a, self.b - other.b, self.delta)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.delta)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadExt(self.a * other, self.b * other, self.delta)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.a, self.b, other.a, other.b
        return QuadExt(a * c + b * d * self.delta, a * d + b * c, self.delta)

    __rmul__ = __mul__

    def inverse(self) -> QuadExt:
        n = self.norm()
        if not n:
            raise ZeroDivisionError("inverse of zero in E")
        return QuadExt(self.a / n, -self.b / n, self.delta)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadExt(self.a / other, self.b / other, self.delta)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = QuadExt(1, 0, self.delta)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> QuadExt:
        return QuadExt(self.a, -self.b, self.delta)

    def norm(self) -> Fraction:
        return self.a * self.a - self.delta * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __eq__(self, other):
        if isinstance(other, QuadExt):
            return self.a == other.a and self.b == other.b and self.delta == other.delta
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if not self.b:
            return hash(self.a)
        return hash((self.a, self.b, self.delta))

    def __repr__(self):
        return f"QuadExt({self.a}, {self.b}, delta={self.delta})"

    def __str__(self):
        if not self.b:
            return str(self.a)
        return f"{self.a}+{self.b}d"


def conj(x):
    """Galois conjugation; the identity on F."""
    if isinstance(x, QuadExt):
        return x.conj()
    return x


def norm_EF(x) -> Fraction:
    if isinstance(x, QuadExt):
        return x.norm()
    x = as_fraction(x)
    return x * x


def trace_EF(x) -> Fraction:
    if isinstance(x, QuadExt):
        return x.trace()
    return 2 * as_fraction(x)


class RationalField:
    name = "F"
    delta = None

    def __init__(self):
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def __call__(self, x) -> Fraction:
        return as_fraction(x)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


QQ = RationalField()


class QuadExtField:
    name = "E"

    def __init__(self, delta):
        self.delta = as_fraction(delta)
        if not self.delta:
            raise ValueError("Delta must be nonzero")
        self.zero = QuadExt(0, 0, self.delta)
        self.one = QuadExt(1, 0, self.delta)

    def __call__(self, x, b=0) -> QuadExt:
        if isinstance(x, QuadExt):
            if x.delta != self.delta:
                raise ValueError("element of a different extension")
            return x
        return QuadExt(x, b, self.delta)

    @property
    def gen(self) -> QuadExt:
        return QuadExt(0, 1, self.delta)

    def __eq__(self, other):
        return isinstance(other, QuadExtField) and other.delta == self.delta

    def __hash__(self):
        return hash(("E", self.delta))

    def __repr__(self):
        return f"QuadExtField({self.delta})"


class Matrix:
    """Dense matrix over QQ or a QuadExtField.  Treated as immutable."""

    __slots__ = ("rows", "nrows", "ncols", "field")

    def __init__(self, rows, field=QQ, ncols=None):
        self.field = field
        self.rows = [[field(x) for x in row] for row in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else (ncols or 0)
        for row in self.rows:
            if len(row) != self.ncols:
                raise ShapeMismatch("ragged rows")

    @classmethod
    def _raw(cls, rows, field, ncols=None):
        # rows are trusted: already field elements and rectangular
        m = object.__new__(cls)
        m.field = field
        m.rows = rows
        m.nrows = len(rows)
        m.ncols = len(rows[0]) if rows else (ncols or 0)
        return m

    @classmethod
    def identity(cls, n, field=QQ):
        z, o = field.zero, field.one
        return cls._raw([[o if i == j else z for j in range(n)] for i in range(n)], field, n)

    @classmethod
    def zeros(cls, nrows, ncols, field=QQ):
        z = field.zero
        return cls._raw([[z] * ncols for _ in range(nrows)], field, ncols)

    @classmethod
    def diag(cls, entries, field=QQ):
        entries = [field(x) for x in entries]
        n = len(entries)
        z = field.zero
        rows = [[entries[i] if i == j else z for j in range(n)] for i in range(n)]
        return cls._raw(rows, field, n)

    @classmethod
    def from_blocks(cls, blocks):
        """Assemble from a 2-d list of matrices."""
        field = blocks[0][0].field
        rows = []
        for brow in blocks:
            h = brow[0].nrows
            if any(b.nrows != h for b in brow):
                raise ShapeMismatch("block heights differ")
            for i in range(h):
                r = []
                for b in brow:
                    r.extend(b.rows[i])
                rows.append(r)
        return cls._raw(rows, field)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash(tuple(tuple(r) for r in self.rows))

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self.rows)
        return f"Matrix({self.nrows}x{self.ncols}, [{body}])"

    def tolist(self):
        return [list(r) for r in self.rows]

    def is_zero(self) -> bool:
        return not any(x for r in self.rows for x in r)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __add__(self, other):
        if self.shape != other.shape:
            raise ShapeMismatch(f"{self.shape} + {other.shape}")
        return Matrix._raw(
            [[x + y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)],
            self.field, self.ncols)

    def __sub__(self, other):
        if self.shape != other.shape:
            raise ShapeMismatch(f"{self.shape} - {other.shape}")
        return Matrix._raw(
            [[x - y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)],
            self.field, self.ncols)

    def __neg__(self):
        return Matrix._raw([[-x for x in r] for r in self.rows], self.field, self.ncols)

    def scale(self, c):
        c = self.field(c)
        return Matrix._raw([[c * x for x in r] for r in self.rows], self.field, self.ncols)

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ShapeMismatch(f"{self.shape} @ {other.shape}")
        fast = self.field is QQ
        zero = mpq(0) if fast else self.field.zero
        A = to_mpq_rows(self.rows) if fast else self.rows
        B = to_mpq_rows(other.rows) if fast else other.rows
        n = other.ncols
        out = []
        for row in A:
            acc = [zero] * n
            for k, a in enumerate(row):
                if a:
                    for j, b in enumerate(B[k]):
                        if b:
                            acc[j] = acc[j] + a * b
            out.append(acc)
        return Matrix._raw(to_fraction_rows(out) if fast else out, self.field, n)

    @property
    def T(self):
        return Matrix._raw([list(c) for c in zip(*self.rows)], self.field, self.nrows)

    def conj(self):
        if self.field is QQ:
            return self
        return Matrix._raw([[x.conj() for x in r] for r in self.rows], self.field, self.ncols)

    @property
    def H(self):
        """Conjugate transpose (plain transpose over F)."""
        return self.conj().T

    def submatrix(self, r0, r1, c0, c1):
        return Matrix._raw([r[c0:c1] for r in self.rows[r0:r1]], self.field, c1 - c0)

    def row(self, i):
        return Matrix._raw([list(self.rows[i])], self.field, self.ncols)

    def hstack(self, other):
        if self.nrows != other.nrows:
            raise ShapeMismatch("hstack heights differ")
        return Matrix._raw([r + s for r, s in zip(self.rows, other.rows)], self.field)

    def vstack(self, other):
        if not self.nrows:
            return other
        if not other.nrows:
            return self
        if self.ncols != other.ncols:
            raise ShapeMismatch("vstack widths differ")
        return Matrix._raw([list(r) for r in self.rows + other.rows], self.field, self.ncols)

    def map(self, fn, field=None):
        field = field or self.field
        return Matrix._raw([[fn(x) for x in r] for r in self.rows], field, self.ncols)

    # -- elimination -------------------------------------------------------

    def rref(self):
        """Reduced row echelon form and pivot columns."""
        fast = self.field is QQ
        A = to_mpq_rows(self.rows) if fast else [list(r) for r in self.rows]
        nr, nc = self.nrows, self.ncols
        pivots = []
        i = 0
        for j in range(nc):
            if i == nr:
                break
            k = next((k for k in range(i, nr) if A[k][j]), None)
            if k is None:
                continue
            A[i], A[k] = A[k], A[i]
            piv = A[i][j]
            A[i] = [x / piv for x in A[i]]
            Ai = A[i]
            for t in range(nr):
                if t != i and A[t][j]:
                    f = A[t][j]
                    A[t] = [x - f * y if y else x for x, y in zip(A[t], Ai)]
            pivots.append(j)
            i += 1
        return Matrix._raw(to_fraction_rows(A) if fast else A, self.field, nc), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def row_space(self):
        """Basis of the row space, as the nonzero rows of the rref."""
        R, piv = self.rref()
        return Matrix._raw(R.rows[:len(piv)], self.field, self.ncols)

    def nullspace(self):
        """Rows spanning {x : self @ x^T = 0} (right kernel)."""
        R, piv = self.rref()
        nc = self.ncols
        free = [j for j in range(nc) if j not in piv]
        zero, one = self.field.zero, self.field.one
        basis = []
        for f in free:
            v = [zero] * nc
            v[f] = one
            for i, pj in enumerate(piv):
                v[pj] = -R.rows[i][f]
            basis.append(v)
        return Matrix._raw(basis, self.field, nc)

    def left_nullspace(self):
        """Rows spanning {y : y @ self = 0}."""
        return self.T.nullspace()

    def det(self):
        if not self.is_square():
            raise ShapeMismatch("det of non-square matrix")
        fast = self.field is QQ
        A = to_mpq_rows(self.rows) if fast else [list(r) for r in self.rows]
        n = self.nrows
        d = mpq(1) if fast else self.field.one
        for j in range(n):
            k = next((k for k in range(j, n) if A[k][j]), None)
            if k is None:
                return self.field.zero
            if k != j:
                A[j], A[k] = A[k], A[j]
                d = -d
            piv = A[j][j]
            d = d * piv
            Aj = A[j]
            for t in range(j + 1, n):
                if A[t][j]:
                    f = A[t][j] / piv
                    A[t] = [x - f * y if y else x for x, y in zip(A[t], Aj)]
        return to_fraction(d) if fast else d

    def inverse(self):
        if not self.is_square():
            raise ShapeMismatch("inverse of non-square matrix")
        n = self.nrows
        aug = self.hstack(Matrix.identity(n, self.field))
        R, piv = aug.rref()
        if piv[:n] != list(range(n)):
            raise SingularMatrix("matrix is not invertible")
        return R.submatrix(0, n, n, 2 * n)

    def solve(self, b):
        """Solve self @ x = b for x (b a matrix of right-hand-side columns)."""
        if self.nrows != b.nrows:
            raise ShapeMismatch("solve: row counts differ")
        nc = self.ncols
        R, piv = self.hstack(b).rref()
        if any(p >= nc for p in piv):
            raise SingularMatrix("inconsistent system")
        zero = self.field.zero
        x = [[zero] * b.ncols for _ in range(nc)]
        for i, pj in enumerate(piv):
            x[pj] = R.rows[i][nc:]
        return Matrix._raw(x, self.field, b.ncols)

    def left_solve(self, b):
        """Solve y @ self = b for y."""
        return self.T.solve(b.T).T


def same_row_space(A: Matrix, B: Matrix) -> bool:
    return A.row_space() == B.row_space()


def restrict_scalars(M: Matrix, side: str = "left") -> Matrix:
    """View an E-matrix as an F-matrix through the ordered basis (1, delta).

    ``side="left"`` is the column-vector convention: multiplication by
    a + b*delta becomes [[a, b*Delta], [b, a]].  ``side="right"`` is its
    transpose, for matrices acting on row vectors.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    delta = M.field.delta
    if delta is None:
        raise ValueError("restrict_scalars needs an E-matrix")
    rows = []
    for r in M.rows:
        top, bot = [], []
        for x in r:
            a, b = x.a, x.b
            if side == "left":
                top += [a, b * delta]
                bot += [b, a]
            else:
                top += [a, b]
                bot += [b * delta, a]
        rows.append(top)
        rows.append(bot)
    return Matrix._raw(rows, QQ, 2 * M.ncols)
