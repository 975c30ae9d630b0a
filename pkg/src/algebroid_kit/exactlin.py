"""Dense exact linear algebra over Q: rref, kernels, and homology dimensions."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import NotAComplex


class QMatrix:
    """Immutable dense matrix of Fractions; shape (rows, cols) may have a zero side."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence], rows: int | None = None, cols: int | None = None):
        entries = tuple(tuple(Fraction(x) for x in row) for row in entries)
        if rows is None:
            rows = len(entries)
        if cols is None:
            cols = len(entries[0]) if entries else 0
        if len(entries) != rows or any(len(r) != cols for r in entries):
            raise ValueError(f"entries do not form a {rows}x{cols} matrix")
        self.rows = rows
        self.cols = cols
        self.entries = entries

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "QMatrix":
        return cls([[0] * cols for _ in range(rows)], rows, cols)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "QMatrix":
        return cls([[col[i] for col in columns] for i in range(rows)], rows, len(columns))

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot compose {self.rows}x{self.cols} with {other.rows}x{other.cols}")
        out = []
        other_cols = list(zip(*other.entries)) if other.rows else [()] * other.cols
        for row in self.entries:
            out.append([sum((a * b for a, b in zip(row, col) if a and b), Fraction(0)) for col in other_cols])
        return QMatrix(out, self.rows, other.cols)

    def apply(self, v: Sequence) -> list[Fraction]:
        return [sum((a * Fraction(b) for a, b in zip(row, v) if a and b), Fraction(0)) for row in self.entries]

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def column(self, j: int) -> list[Fraction]:
        return [row[j] for row in self.entries]

    def __eq__(self, other):
        return isinstance(other, QMatrix) and (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    def __repr__(self):
        return f"QMatrix({[[str(x) for x in r] for r in self.entries]})"


def rref(m: QMatrix) -> tuple[QMatrix, list[int]]:
    """Reduced row echelon form; pivots are chosen as the first nonzero entry in column order."""
    a = [list(row) for row in m.entries]
    pivots = []
    r = 0
    for c in range(m.cols):
        if r == m.rows:
            break
        p = next((i for i in range(r, m.rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        pivot_row = a[r]
        for i in range(m.rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], pivot_row)]
        pivots.append(c)
        r += 1
    return QMatrix(a, m.rows, m.cols), pivots


def rank(m: QMatrix) -> int:
    return len(rref(m)[1])


def kernel_basis(m: QMatrix) -> list[list[Fraction]]:
    """Basis of the right null space, one vector per free column."""
    red, pivots = rref(m)
    pivot_set = set(pivots)
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * m.cols
        v[free] = Fraction(1)
        for row, pc in enumerate(pivots):
            v[pc] = -red.entries[row][free]
        basis.append(v)
    return basis


def quotient_dim(d_out: QMatrix, d_in: QMatrix) -> int:
    """dim ker(d_out) - rank(d_in) for a composable pair with d_out @ d_in == 0."""
    if d_out.cols != d_in.rows:
        raise ValueError(f"d_out has {d_out.cols} columns but d_in has {d_in.rows} rows")
    if not (d_out @ d_in).is_zero():
        raise NotAComplex("d_out composed with d_in is not zero")
    return d_out.cols - rank(d_out) - rank(d_in)


def solve(m: QMatrix, b: Sequence) -> list[Fraction] | None:
    """One solution x of m x = b, or None when the system is inconsistent."""
    aug = QMatrix([list(row) + [bv] for row, bv in zip(m.entries, b)], m.rows, m.cols + 1)
    red, pivots = rref(aug)
    if m.cols in pivots:
        return None
    x = [Fraction(0)] * m.cols
    for row, pc in enumerate(pivots):
        x[pc] = red.entries[row][m.cols]
    return x
