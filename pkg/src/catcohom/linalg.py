"""Exact integer linear algebra.

Everything here works on plain Python ints, so there is no overflow no matter
how large the intermediate entries of a reduction get.  The Smith normal form
is the workhorse: kernels, integer solving and the structure of finitely
generated abelian groups are all read off from it.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

Vector = tuple[int, ...]


class IntMatrix:
    """Dense integer matrix with an explicit shape (so 0xN and Nx0 are representable)."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Iterable[Iterable[int]], cols: int | None = None):
        rows = [list(map(int, r)) for r in data]
        if cols is None:
            if not rows:
                raise ValueError("cols must be given for a matrix with no rows")
            cols = len(rows[0])
        for r in rows:
            if len(r) != cols:
                raise ValueError(f"ragged matrix: expected {cols} columns, got {len(r)}")
        self.rows = len(rows)
        self.cols = cols
        self.data = rows

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls([[0] * cols for _ in range(rows)], cols)

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def diagonal(cls, entries: Sequence[int]) -> IntMatrix:
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> IntMatrix:
        return cls([[c[i] for c in columns] for i in range(rows)], len(columns))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def copy(self) -> IntMatrix:
        return IntMatrix([r[:] for r in self.data], self.cols)

    def tolist(self) -> list[list[int]]:
        return [r[:] for r in self.data]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.data)

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> IntMatrix:
        return IntMatrix([[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)], self.rows)

    T = property(transpose)

    def hstack(self, other: IntMatrix) -> IntMatrix:
        if self.rows != other.rows:
            raise ValueError("row counts differ")
        return IntMatrix([a + b for a, b in zip(self.data, other.data)], self.cols + other.cols)

    def apply(self, vec: Sequence[int]) -> Vector:
        if len(vec) != self.cols:
            raise ValueError(f"vector of length {len(vec)} for a matrix with {self.cols} columns")
        return tuple(sum(a * b for a, b in zip(row, vec) if a) for row in self.data)

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        ocols = other.columns()
        return IntMatrix(
            [[sum(a * b for a, b in zip(row, c) if a) for c in ocols] for row in self.data], other.cols
        )

    def __add__(self, other: IntMatrix) -> IntMatrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)], self.cols)

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)], self.cols)

    def __neg__(self) -> IntMatrix:
        return IntMatrix([[-a for a in r] for r in self.data], self.cols)

    def scale(self, k: int) -> IntMatrix:
        return IntMatrix([[k * a for a in r] for r in self.data], self.cols)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self.data == other.data

    def __hash__(self) -> int:
        return hash((self.cols, tuple(map(tuple, self.data))))

    def __repr__(self) -> str:
        return f"IntMatrix({self.data!r}, cols={self.cols})"

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.data for a in r)


def determinant(m: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    if m.rows != m.cols:
        raise ValueError("determinant of a non-square matrix")
    n = m.rows
    a = m.tolist()
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


@dataclass(frozen=True)
class SnfDecomposition:
    """``U @ M @ V == S`` with ``S`` diagonal, ``d1 | d2 | ...``, zeros trailing."""

    S: IntMatrix
    U: IntMatrix
    V: IntMatrix
    rank: int

    @property
    def diagonal(self) -> list[int]:
        return [self.S.data[i][i] for i in range(self.rank)]


def smith_normal_form(m: IntMatrix) -> SnfDecomposition:
    # Pivot: nonzero entry of least absolute value in the active block, ties
    # broken by lowest (row, col).  Floor division keeps every remainder
    # strictly smaller than the pivot, which is what guarantees termination.
    rows, cols = m.rows, m.cols
    a = m.tolist()
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(i: int, j: int) -> None:
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i: int, j: int) -> None:
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(dst: int, src: int, k: int) -> None:
        # row_dst += k * row_src
        ad, as_ = a[dst], a[src]
        for c in range(cols):
            if as_[c]:
                ad[c] += k * as_[c]
        ud, us = u[dst], u[src]
        for c in range(rows):
            if us[c]:
                ud[c] += k * us[c]

    def add_col(dst: int, src: int, k: int) -> None:
        for r in a:
            if r[src]:
                r[dst] += k * r[src]
        for r in v:
            if r[src]:
                r[dst] += k * r[src]

    rank = 0
    for t in range(min(rows, cols)):
        while True:
            best = None
            for i in range(t, rows):
                row = a[i]
                for j in range(t, cols):
                    x = row[j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
                        if best[0] == 1:
                            break
                if best is not None and best[0] == 1:
                    break
            if best is None:
                break
            _, pi, pj = best
            if pi != t:
                swap_rows(t, pi)
            if pj != t:
                swap_cols(t, pj)
            p = a[t][t]
            clean = True
            for i in range(t + 1, rows):
                if a[i][t]:
                    q = a[i][t] // p
                    if q:
                        add_row(i, t, -q)
                    if a[i][t]:
                        clean = False
            for j in range(t + 1, cols):
                if a[t][j]:
                    q = a[t][j] // p
                    if q:
                        add_col(j, t, -q)
                    if a[t][j]:
                        clean = False
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, rows) if any(a[i][j] % p for j in range(t + 1, cols))),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if best is None:
            break
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        rank += 1

    return SnfDecomposition(IntMatrix(a, cols), IntMatrix(u, rows), IntMatrix(v, cols), rank)


@dataclass(frozen=True)
class AbelianGroupStructure:
    """Z^free_rank + Z/d1 + ... + Z/dt in invariant-factor form.

    As a fiber of a module the canonical generators are ordered torsion first,
    then free; element vectors are reduced coordinate-wise modulo the orders.
    """

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        tor = tuple(int(d) for d in self.torsion)
        for d in tor:
            if d < 2:
                raise ValueError(f"invariant factor {d} must be >= 2")
        for d, e in zip(tor, tor[1:]):
            if e % d:
                raise ValueError(f"divisibility chain broken: {d} does not divide {e}")
        object.__setattr__(self, "torsion", tor)

    @classmethod
    def from_orders(cls, orders: Iterable[int]) -> AbelianGroupStructure:
        """Canonical structure of a direct sum of cyclic groups (order 0 = Z)."""
        orders = [abs(int(o)) for o in orders]
        free = sum(1 for o in orders if o == 0)
        finite = [o for o in orders if o > 1]
        if not finite:
            return cls(free, ())
        decomp = smith_normal_form(IntMatrix.diagonal(finite))
        return cls(free, tuple(d for d in decomp.diagonal if d > 1))

    @property
    def ngens(self) -> int:
        return len(self.torsion) + self.free_rank

    @property
    def orders(self) -> tuple[int, ...]:
        return self.torsion + (0,) * self.free_rank

    def is_trivial(self) -> bool:
        return self.ngens == 0

    def reduce(self, vec: Sequence[int]) -> Vector:
        if len(vec) != self.ngens:
            raise ValueError(f"element of length {len(vec)} in a group with {self.ngens} generators")
        return tuple(x % o if o else x for x, o in zip(vec, self.orders))

    def zero(self) -> Vector:
        return (0,) * self.ngens

    def relations(self) -> IntMatrix:
        """Columns ``d_i e_i`` spanning the relation lattice."""
        n = self.ngens
        cols = [tuple(d if r == i else 0 for r in range(n)) for i, d in enumerate(self.torsion)]
        return IntMatrix.from_columns(cols, n)

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.torsion]
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"


def cokernel_structure(m: IntMatrix) -> AbelianGroupStructure:
    """Structure of Z^rows / image(m)."""
    decomp = smith_normal_form(m)
    return AbelianGroupStructure(m.rows - decomp.rank, tuple(d for d in decomp.diagonal if d > 1))


def solve_integer(m: IntMatrix, b: Sequence[int]) -> Vector | None:
    """Some integer ``x`` with ``m x = b``, or None.

    Free coordinates of the diagonalized system are set to zero, so the
    answer is a deterministic function of the input.
    """
    if len(b) != m.rows:
        raise ValueError(f"right-hand side has length {len(b)}, matrix has {m.rows} rows")
    decomp = smith_normal_form(m)
    c = decomp.U.apply(b)
    y = [0] * m.cols
    for i in range(decomp.rank):
        q, r = divmod(c[i], decomp.S.data[i][i])
        if r:
            return None
        y[i] = q
    if any(c[i] for i in range(decomp.rank, m.rows)):
        return None
    return decomp.V.apply(y)


def _sign_normalize(vec: Vector) -> Vector:
    for x in vec:
        if x:
            return vec if x > 0 else tuple(-y for y in vec)
    return vec


def kernel_basis(m: IntMatrix) -> list[Vector]:
    decomp = smith_normal_form(m)
    return [_sign_normalize(decomp.V.column(j)) for j in range(decomp.rank, m.cols)]


def lattice_basis(generators: Sequence[Sequence[int]], dim: int) -> list[Vector]:
    """A Z-basis of the sublattice of Z^dim spanned by ``generators``."""
    if not generators:
        return []
    w = IntMatrix.from_columns(generators, dim)
    decomp = smith_normal_form(w)
    uinv = unimodular_inverse(decomp.U)
    return [tuple(d * x for x in uinv.column(i)) for i, d in enumerate(decomp.diagonal)]


def unimodular_inverse(u: IntMatrix) -> IntMatrix:
    """Inverse of a unimodular matrix, computed exactly by Gauss-Jordan over Z."""
    n = u.rows
    a = [row[:] + [int(i == j) for j in range(n)] for i, row in enumerate(u.data)]
    for c in range(n):
        # Euclid on the column below the diagonal until a unit pivot appears.
        while True:
            nz = [i for i in range(c, n) if a[i][c]]
            if not nz:
                raise ValueError("matrix is singular")
            piv = min(nz, key=lambda i: (abs(a[i][c]), i))
            a[c], a[piv] = a[piv], a[c]
            done = True
            for i in range(c + 1, n):
                if a[i][c]:
                    q = a[i][c] // a[c][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[c])]
                    if a[i][c]:
                        done = False
            if done:
                break
        if abs(a[c][c]) != 1:
            raise ValueError("matrix is not unimodular")
        if a[c][c] < 0:
            a[c] = [-x for x in a[c]]
    for c in range(n - 1, -1, -1):
        for i in range(c):
            if a[i][c]:
                q = a[i][c]
                a[i] = [x - q * y for x, y in zip(a[i], a[c])]
    return IntMatrix([row[n:] for row in a], n)


def subquotient_structure(
    cycles: Sequence[Sequence[int]], boundaries: Sequence[Sequence[int]], dim: int
) -> AbelianGroupStructure:
    """Structure of span(cycles) / span(boundaries) inside Z^dim.

    The boundary span must lie inside the cycle span; a boundary vector that
    is not an integer combination of the cycle basis raises ValueError.
    """
    basis = lattice_basis(cycles, dim)
    if not basis:
        if any(any(b) for b in boundaries):
            raise ValueError("boundaries are not contained in the cycle lattice")
        return AbelianGroupStructure()
    zmat = IntMatrix.from_columns(basis, dim)
    coords = []
    for b in boundaries:
        y = solve_integer(zmat, b)
        if y is None:
            raise ValueError("boundaries are not contained in the cycle lattice")
        coords.append(y)
    return cokernel_structure(IntMatrix.from_columns(coords, len(basis)))


def vector_gcd(vec: Iterable[int]) -> int:
    g = 0
    for x in vec:
        g = gcd(g, x)
    return g
