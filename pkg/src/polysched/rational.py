"""Exact rational matrices: rank and the orthogonal-complement projector.

All arithmetic uses ``fractions.Fraction``; nothing in this package ever
touches floating point.  Matrices are small (iterator counts), so plain
Gaussian elimination is all that is needed.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

from .errors import SingularGram

Rat = Fraction


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class RatMatrix:
    """Dense matrix of Fractions with value semantics."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, entries):
        self.data = [[_frac(v) for v in row] for row in entries]
        self.rows = len(self.data)
        self.cols = len(self.data[0]) if self.data else 0
        for row in self.data:
            if len(row) != self.cols:
                raise ValueError("ragged matrix")

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls([[Fraction(int(i == j)) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls([[Fraction(0)] * cols for _ in range(rows)])

    def __getitem__(self, rc):
        r, c = rc
        return self.data[r][c]

    def __eq__(self, other):
        return isinstance(other, RatMatrix) and self.data == other.data

    def __repr__(self):
        body = "; ".join(" ".join(str(v) for v in row) for row in self.data)
        return f"RatMatrix({self.rows}x{self.cols}: {body})"

    def transpose(self) -> "RatMatrix":
        return RatMatrix([[self.data[r][c] for r in range(self.rows)]
                          for c in range(self.cols)])

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        out = []
        for r in range(self.rows):
            row = []
            for c in range(other.cols):
                acc = Fraction(0)
                for k in range(self.cols):
                    a = self.data[r][k]
                    if a:
                        acc += a * other.data[k][c]
                row.append(acc)
            out.append(row)
        return RatMatrix(out)

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return RatMatrix([[self.data[r][c] - other.data[r][c]
                           for c in range(self.cols)] for r in range(self.rows)])


def rank(m: RatMatrix) -> int:
    """Rank over the rationals, by exact Gaussian elimination."""
    a = [row[:] for row in m.data]
    nr, nc = m.rows, m.cols
    r = 0
    for c in range(nc):
        pivot = next((i for i in range(r, nr) if a[i][c]), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        inv = 1 / a[r][c]
        a[r] = [v * inv for v in a[r]]
        for i in range(nr):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
        r += 1
        if r == nr:
            break
    return r


def _invert(m: RatMatrix) -> RatMatrix:
    """Exact inverse via Gauss-Jordan; raises SingularGram when singular."""
    n = m.rows
    a = [m.data[i][:] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        pivot = next((i for i in range(c, n) if a[i][c]), None)
        if pivot is None:
            raise SingularGram("matrix is singular")
        a[c], a[pivot] = a[pivot], a[c]
        inv = 1 / a[c][c]
        a[c] = [v * inv for v in a[c]]
        for i in range(n):
            if i != c and a[i][c]:
                f = a[i][c]
                a[i] = [vi - f * vc for vi, vc in zip(a[i], a[c])]
    return RatMatrix([row[n:] for row in a])


def orthogonal_complement(h: RatMatrix) -> RatMatrix:
    """Projector onto the orthogonal complement of the row space of ``h``.

    Computes I - H^T (H H^T)^-1 H and then rescales to integer entries:
    the whole matrix is multiplied by the least common multiple of the
    entry denominators, and each row is divided by the gcd of its entries.
    Scaling a row of a homogeneous inequality system by a positive integer
    does not change its solution set, so the caller can use the result
    directly as integer constraint rows.
    """
    gram = h @ h.transpose()
    proj = RatMatrix.identity(h.cols) - (h.transpose() @ _invert(gram) @ h)
    denom = 1
    for row in proj.data:
        for v in row:
            denom = lcm(denom, v.denominator)
    scaled = []
    for row in proj.data:
        ints = [int(v * denom) for v in row]
        g = 0
        for v in ints:
            g = gcd(g, abs(v))
        if g > 1:
            ints = [v // g for v in ints]
        scaled.append(ints)
    return RatMatrix(scaled)
