"""Exact dense matrices over the rationals.

Entries are stored as :class:`fractions.Fraction`, which is always kept in
lowest terms with a positive denominator, so equality and hashing are
structural.  Matrices are immutable; every operation returns a new one.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import lcm, prod
from numbers import Rational

from .errors import DimensionError, DomainError, MinorSpecError, NotSymmetricError, PivotError


def as_rational(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not matrix entries")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


class ExactMatrix:
    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows, cols, entries):
        entries = tuple(as_rational(x) for x in entries)
        if rows < 0 or cols < 0 or len(entries) != rows * cols:
            raise DimensionError(f"{len(entries)} entries do not fill a {rows}x{cols} matrix")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("ExactMatrix is immutable")

    @classmethod
    def from_rows(cls, rows):
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise DimensionError("ragged rows")
        return cls(len(rows), ncols, [x for r in rows for x in r])

    @classmethod
    def from_function(cls, rows, cols, f):
        return cls(rows, cols, [f(i, j) for i in range(rows) for j in range(cols)])

    @classmethod
    def identity(cls, n):
        return cls.from_function(n, n, lambda i, j: 1 if i == j else 0)

    @classmethod
    def diagonal(cls, values):
        values = list(values)
        return cls.from_function(len(values), len(values), lambda i, j: values[i] if i == j else 0)

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def is_square(self):
        return self.rows == self.cols

    def __getitem__(self, ij):
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return self.entries[i * self.cols + j]

    def row(self, i):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_lists(self):
        return [list(self.row(i)) for i in range(self.rows)]

    def submatrix(self, row_idx, col_idx):
        return ExactMatrix(len(row_idx), len(col_idx),
                           [self[i, j] for i in row_idx for j in col_idx])

    def leading(self, k):
        return self.submatrix(range(k), range(k))

    def is_integral(self):
        return all(x.denominator == 1 for x in self.entries)

    def is_symmetric(self):
        return self.is_square and all(
            self[i, j] == self[j, i] for i in range(self.rows) for j in range(i))

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __matmul__(self, other):
        return mat_mul(self, other)

    @property
    def T(self):
        return transpose(self)

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in self.row(i)) for i in range(self.rows))
        return f"ExactMatrix({self.rows}x{self.cols}: [{body}])"


@dataclass(frozen=True)
class MinorSpec:
    """Row and column index sets selecting a square submatrix."""

    rows: tuple
    cols: tuple

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "cols", tuple(self.cols))
        if not self.rows or len(self.rows) != len(self.cols):
            raise MinorSpecError("row and column index sets must be non-empty and of equal size")
        for idx in (self.rows, self.cols):
            if any(b <= a for a, b in zip(idx, idx[1:])):
                raise MinorSpecError(f"indices not strictly increasing: {idx}")
            if idx[0] < 0:
                raise MinorSpecError(f"negative index in {idx}")

    @property
    def order(self):
        return len(self.rows)

    def sort_key(self):
        return (self.order, self.rows, self.cols)

    def check_bounds(self, m):
        if self.rows[-1] >= m.rows or self.cols[-1] >= m.cols:
            raise MinorSpecError(f"{self} out of bounds for a {m.rows}x{m.cols} matrix")

    def to_json(self):
        return {"rows": list(self.rows), "cols": list(self.cols)}


def integer_det(a):
    """Bareiss fraction-free determinant of a square list-of-lists of ints.

    The input is not modified.
    """
    n = len(a)
    if n == 0:
        return 1
    m = [list(r) for r in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        rk = m[k]
        for i in range(k + 1, n):
            ri = m[i]
            f = ri[k]
            for j in range(k + 1, n):
                # exact division is guaranteed by Sylvester's identity
                ri[j] = (ri[j] * pivot - f * rk[j]) // prev
            ri[k] = 0
        prev = pivot
    return sign * m[n - 1][n - 1]


def integer_rows(m):
    """Scale each row by the lcm of its denominators.

    Returns ``(rows, scale)`` where ``rows`` are int lists and ``scale`` the
    positive row multipliers.
    """
    out, scale = [], []
    for i in range(m.rows):
        r = m.row(i)
        d = lcm(*(x.denominator for x in r)) if r else 1
        out.append([int(x * d) for x in r])
        scale.append(d)
    return out, scale


def det(m):
    if not m.is_square:
        raise DimensionError(f"determinant of a non-square {m.rows}x{m.cols} matrix")
    if m.rows == 0:
        raise DimensionError("determinant of an empty matrix")
    rows, scale = integer_rows(m)
    return Fraction(integer_det(rows), prod(scale))


def minor(m, spec):
    spec.check_bounds(m)
    return det(m.submatrix(spec.rows, spec.cols))


def mat_mul(a, b):
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    bt = [b.entries[j::b.cols] for j in range(b.cols)]
    return ExactMatrix(a.rows, b.cols, [
        sum((x * y for x, y in zip(a.row(i), bt[j])), Fraction(0))
        for i in range(a.rows) for j in range(b.cols)])


def transpose(m):
    return ExactMatrix(m.cols, m.rows, [m[i, j] for j in range(m.cols) for i in range(m.rows)])


def diag_scale(m, row_factors, col_factors):
    """Return the matrix with entries ``row_factors[n] * col_factors[k] * m[n, k]``."""
    a = [as_rational(x) for x in row_factors]
    b = [as_rational(x) for x in col_factors]
    if len(a) != m.rows or len(b) != m.cols:
        raise DimensionError("scaling vectors do not match the matrix shape")
    if any(x <= 0 for x in a + b):
        raise DomainError("scaling factors must be strictly positive")
    return ExactMatrix.from_function(m.rows, m.cols, lambda i, j: a[i] * b[j] * m[i, j])


def ldl_decompose(m):
    """Exact ``m = L diag(D) L^T`` with unit lower-triangular ``L``.

    No pivoting: a zero leading principal minor raises :class:`PivotError`.
    """
    if not m.is_square:
        raise DimensionError("LDL needs a square matrix")
    if not m.is_symmetric():
        raise NotSymmetricError("LDL needs a symmetric matrix")
    n = m.rows
    L = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    D = []
    for j in range(n):
        d = m[j, j] - sum((L[j][k] ** 2 * D[k] for k in range(j)), Fraction(0))
        if d == 0:
            raise PivotError(j + 1)
        D.append(d)
        for i in range(j + 1, n):
            s = m[i, j] - sum((L[i][k] * L[j][k] * D[k] for k in range(j)), Fraction(0))
            L[i][j] = s / d
    return ExactMatrix.from_rows(L), D


def format_rational(x):
    x = as_rational(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def to_csv(m):
    return "".join(",".join(format_rational(x) for x in m.row(i)) + "\n" for i in range(m.rows))
