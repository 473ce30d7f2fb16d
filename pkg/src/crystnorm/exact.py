"""Exact integer and rational linear algebra.

Everything here works on Python ints and :class:`fractions.Fraction`, so
there is no overflow and no rounding.  Values are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import NotSublatticeError

__all__ = [
    "IntMatrix",
    "RatVector",
    "SnfResult",
    "Lattice",
    "CongruenceSolution",
    "hnf",
    "snf",
    "solve_integer",
    "solve_congruence",
    "lattice_quotient_invariants",
    "rat_rank",
    "rat_inverse",
]


class IntMatrix:
    """Immutable integer matrix stored row-major in a flat tuple."""

    __slots__ = ("rows", "cols", "entries", "_hash")

    def __init__(self, data: Sequence[Sequence[int]] = ()):
        data = [list(r) for r in data]
        rows = len(data)
        cols = len(data[0]) if rows else 0
        flat = []
        for r in data:
            if len(r) != cols:
                raise ValueError("ragged matrix rows")
            for x in r:
                if isinstance(x, Fraction):
                    if x.denominator != 1:
                        raise ValueError(f"non-integral entry {x}")
                    x = x.numerator
                elif not isinstance(x, int):
                    xi = int(x)
                    if xi != x:
                        raise ValueError(f"non-integral entry {x!r}")
                    x = xi
                flat.append(int(x))
        self._set(rows, cols, tuple(flat))

    def _set(self, rows, cols, entries):
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("IntMatrix is immutable")

    @classmethod
    def from_flat(cls, rows: int, cols: int, entries: Iterable[int]) -> "IntMatrix":
        entries = tuple(entries)
        if len(entries) != rows * cols:
            raise ValueError("entry count does not match shape")
        m = cls.__new__(cls)
        m._set(rows, cols, entries)
        return m

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls.from_flat(n, n, (1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls.from_flat(rows, cols, (0,) * (rows * cols))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: Optional[int] = None) -> "IntMatrix":
        if not columns:
            return cls.zeros(rows or 0, 0)
        return cls(list(zip(*columns)))

    @classmethod
    def block_diag(cls, *blocks: "IntMatrix") -> "IntMatrix":
        n = sum(b.rows for b in blocks)
        m = sum(b.cols for b in blocks)
        out = [[0] * m for _ in range(n)]
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    out[r0 + i][c0 + j] = b[i, j]
            r0 += b.rows
            c0 += b.cols
        return cls.from_flat(n, m, (x for row in out for x in row))

    @classmethod
    def vstack(cls, blocks: Sequence["IntMatrix"]) -> "IntMatrix":
        cols = blocks[0].cols
        if any(b.cols != cols for b in blocks):
            raise ValueError("column counts differ")
        return cls.from_flat(sum(b.rows for b in blocks), cols,
                             (x for b in blocks for x in b.entries))

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def is_square(self):
        return self.rows == self.cols

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple:
        return self.entries[j::self.cols] if self.cols else ()

    def tolist(self) -> list:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix.from_flat(self.cols, self.rows,
                                   (x for j in range(self.cols) for x in self.col(j)))

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.cols != other.rows:
                raise ValueError("shape mismatch")
            k, m = self.cols, other.cols
            a = self.entries
            bcols = [other.col(j) for j in range(m)]
            out = []
            for i in range(self.rows):
                r = a[i * k:(i + 1) * k]
                for bc in bcols:
                    out.append(sum(x * y for x, y in zip(r, bc)))
            return IntMatrix.from_flat(self.rows, m, out)
        vec = tuple(other)
        if len(vec) != self.cols:
            raise ValueError("shape mismatch")
        out = [sum(x * y for x, y in zip(self.row(i), vec)) for i in range(self.rows)]
        if isinstance(other, RatVector):
            return RatVector(out)
        return tuple(out)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix.from_flat(self.rows, self.cols,
                                   (x + y for x, y in zip(self.entries, other.entries)))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix.from_flat(self.rows, self.cols,
                                   (x - y for x, y in zip(self.entries, other.entries)))

    def __neg__(self) -> "IntMatrix":
        return IntMatrix.from_flat(self.rows, self.cols, (-x for x in self.entries))

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix.from_flat(self.rows, self.cols, (k * x for x in self.entries))

    def det(self) -> int:
        if not self.is_square:
            raise ValueError("determinant of a non-square matrix")
        return bareiss_det(self.tolist())

    def is_unimodular(self) -> bool:
        return self.is_square and self.det() in (1, -1)

    def inverse(self) -> "IntMatrix":
        """Inverse of a unimodular matrix (raises ValueError otherwise)."""
        if not self.is_square:
            raise ValueError("inverse of a non-square matrix")
        det, adj = _bareiss_adjugate(self.tolist())
        if det not in (1, -1):
            raise ValueError("matrix is not invertible over the integers")
        n = self.rows
        return IntMatrix.from_flat(n, n, (det * x for row in adj for x in row))

    def content(self) -> int:
        g = 0
        for x in self.entries:
            g = math.gcd(g, x)
        return g

    def is_zero(self) -> bool:
        return not any(self.entries)

    def _key(self):
        return (self.rows, self.cols, self.entries)

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self._key() == other._key()

    def __lt__(self, other: "IntMatrix"):
        return self._key() < other._key()

    def __le__(self, other: "IntMatrix"):
        return self._key() <= other._key()

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(self._key())
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        return f"IntMatrix({self.tolist()})"


class RatVector(tuple):
    """Tuple of Fractions; Fraction keeps every entry in lowest terms."""

    def __new__(cls, entries: Iterable = ()):
        return super().__new__(cls, (Fraction(x) for x in entries))

    @classmethod
    def zero(cls, n: int) -> "RatVector":
        return cls((0,) * n)

    @property
    def dim(self) -> int:
        return len(self)

    def __add__(self, other):
        if len(self) != len(other):
            raise ValueError("dimension mismatch")
        return RatVector(a + b for a, b in zip(self, other))

    def __radd__(self, other):
        return RatVector(other).__add__(self)

    def __sub__(self, other):
        if len(self) != len(other):
            raise ValueError("dimension mismatch")
        return RatVector(a - b for a, b in zip(self, other))

    def __neg__(self):
        return RatVector(-a for a in self)

    def __mul__(self, k):
        return RatVector(a * k for a in self)

    __rmul__ = __mul__

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self)

    def mod1(self) -> "RatVector":
        """Canonical representative modulo Z^n, entries in [0, 1)."""
        return RatVector(x % 1 for x in self)

    def denominator(self) -> int:
        d = 1
        for x in self:
            d = math.lcm(d, x.denominator)
        return d

    def __repr__(self):
        return "RatVector(" + ", ".join(str(x) for x in self) + ")"


def bareiss_det(rows: Sequence[Sequence[int]]) -> int:
    n = len(rows)
    if n == 0:
        return 1
    a = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            ri = a[i]
            rk = a[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * akk - aik * rk[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def _bareiss_adjugate(rows):
    """Fraction-free Gauss-Jordan on [A | I]; returns (det A, det A * A^-1)."""
    n = len(rows)
    a = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(rows)]
    sign = 1
    prev = 1
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k] != 0), None)
        if p is None:
            return 0, None
        if p != k:
            a[k], a[p] = a[p], a[k]
            sign = -sign
        akk = a[k][k]
        rk = a[k]
        for i in range(n):
            if i == k:
                continue
            ri = a[i]
            aik = ri[k]
            a[i] = [(akk * x - aik * y) // prev for x, y in zip(ri, rk)]
        prev = akk
    # the left block is now det(PA) * I and the right block det(PA) * A^-1
    if sign == 1:
        return prev, [r[n:] for r in a]
    return -prev, [[-x for x in r[n:]] for r in a]


def _rat_echelon(rows):
    """Reduced row echelon form over Q; returns (matrix, pivot columns)."""
    a = [[Fraction(x) for x in r] for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    pivots = []
    r = 0
    for j in range(n):
        p = next((i for i in range(r, m) if a[i][j] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][j]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][j] != 0:
                f = a[i][j]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(j)
        r += 1
        if r == m:
            break
    return a, pivots


def rat_rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return len(_rat_echelon(rows)[1])


def rat_inverse(rows: Sequence[Sequence]) -> list:
    n = len(rows)
    aug = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(rows)]
    red, pivots = _rat_echelon(aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("singular matrix")
    return [r[n:] for r in red]


def _row_op(mat, i, j, q):
    """row_i -= q * row_j"""
    ri, rj = mat[i], mat[j]
    for k in range(len(ri)):
        ri[k] -= q * rj[k]


def _col_op(mat, i, j, q):
    """col_i -= q * col_j"""
    for r in mat:
        r[i] -= q * r[j]


def hnf(A: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Row Hermite normal form.

    Returns ``(H, U)`` with ``U @ A == H``, U unimodular, H upper echelon
    with positive pivots and the entries above each pivot reduced into
    ``[0, pivot)``.
    """
    m, n = A.shape
    H = A.tolist()
    U = IntMatrix.identity(m).tolist()
    r = 0
    for j in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if H[i][j] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: (abs(H[i][j]), i))
            H[r], H[p] = H[p], H[r]
            U[r], U[p] = U[p], U[r]
            done = True
            for i in range(r + 1, m):
                if H[i][j]:
                    q = H[i][j] // H[r][j]
                    _row_op(H, i, r, q)
                    _row_op(U, i, r, q)
                    if H[i][j]:
                        done = False
            if done:
                break
        if H[r][j] == 0:
            continue
        if H[r][j] < 0:
            H[r] = [-x for x in H[r]]
            U[r] = [-x for x in U[r]]
        piv = H[r][j]
        for i in range(r):
            q = H[i][j] // piv
            if q:
                _row_op(H, i, r, q)
                _row_op(U, i, r, q)
        r += 1
    return IntMatrix.from_flat(m, n, (x for row in H for x in row)), \
        IntMatrix.from_flat(m, m, (x for row in U for x in row))


@dataclass(frozen=True)
class SnfResult:
    D: IntMatrix
    U: IntMatrix
    V: IntMatrix

    @property
    def divisors(self) -> list[int]:
        k = min(self.D.rows, self.D.cols)
        return [self.D[i, i] for i in range(k)]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.divisors if d != 0)


def snf(A: IntMatrix) -> SnfResult:
    """Smith normal form ``U @ A @ V == D`` with d1 | d2 | ... and d_i >= 0.

    The pivot is always a nonzero entry of minimal absolute value in the
    active submatrix (first in row-major order on ties).
    """
    m, n = A.shape
    D = A.tolist()
    U = IntMatrix.identity(m).tolist()
    V = IntMatrix.identity(n).tolist()
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = D[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, pi, pj = best
        D[t], D[pi] = D[pi], D[t]
        U[t], U[pi] = U[pi], U[t]
        for mat in (D, V):
            for r in mat:
                r[t], r[pj] = r[pj], r[t]
        p = D[t][t]
        clean = True
        for i in range(t + 1, m):
            if D[i][t]:
                q = D[i][t] // p
                _row_op(D, i, t, q)
                _row_op(U, i, t, q)
                if D[i][t]:
                    clean = False
        for j in range(t + 1, n):
            if D[t][j]:
                q = D[t][j] // p
                _col_op(D, j, t, q)
                _col_op(V, j, t, q)
                if D[t][j]:
                    clean = False
        if not clean:
            continue
        bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p), None)
        if bad is not None:
            _row_op(D, t, bad, -1)
            _row_op(U, t, bad, -1)
            continue
        if p < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return SnfResult(
        IntMatrix.from_flat(m, n, (x for row in D for x in row)),
        IntMatrix.from_flat(m, m, (x for row in U for x in row)),
        IntMatrix.from_flat(n, n, (x for row in V for x in row)),
    )


def _canonical_row_basis(vectors: Sequence[Sequence[int]]) -> list[tuple]:
    if not vectors:
        return []
    H, _ = hnf(IntMatrix(vectors))
    return [H.row(i) for i in range(H.rows) if any(H.row(i))]


def solve_integer(A: IntMatrix, b: Sequence[int]):
    """Solve ``A x = b`` over the integers.

    Returns ``None`` when there is no integer solution, otherwise
    ``(x, kernel)`` where ``kernel`` is a basis (in Hermite form) of the
    integer solutions of ``A x = 0``.
    """
    m, n = A.shape
    b = [int(x) for x in b]
    if len(b) != m:
        raise ValueError("right-hand side has wrong length")
    res = snf(A)
    c = res.U @ tuple(b)
    d = res.divisors
    r = res.rank
    w = []
    for i in range(r):
        if c[i] % d[i]:
            return None
        w.append(c[i] // d[i])
    if any(c[i] for i in range(r, m)):
        return None
    w += [0] * (n - r)
    x = res.V @ tuple(w)
    kernel = _canonical_row_basis([res.V.col(j) for j in range(r, n)])
    return x, kernel


class Lattice:
    """Full-rank subgroup of Q^n, stored canonically.

    The lattice is ``(1/denominator) * basis * Z^n`` where ``basis`` is the
    column Hermite form of the cleared generator matrix and
    ``denominator`` is the least d with ``d L`` integral.  Equal lattices
    therefore compare equal field by field.
    """

    __slots__ = ("dim", "basis", "denominator")

    def __init__(self, generators: Iterable[Sequence], dim: Optional[int] = None):
        gens = [RatVector(g) for g in generators]
        if dim is None:
            if not gens:
                raise ValueError("cannot infer dimension of an empty generating set")
            dim = len(gens[0])
        if any(len(g) != dim for g in gens):
            raise ValueError("generator dimensions differ")
        d = 1
        for g in gens:
            d = math.lcm(d, g.denominator())
        if dim == 0:
            basis = IntMatrix.zeros(0, 0)
        else:
            rows = [[int(x * d) for x in g] for g in gens]
            brows = _canonical_row_basis(rows) if rows else []
            if len(brows) != dim:
                raise ValueError("generators do not span a full-rank lattice")
            basis = IntMatrix(brows).T
        self.dim = dim
        self.basis = basis
        self.denominator = d

    @classmethod
    def standard(cls, n: int) -> "Lattice":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], dim=n)

    @classmethod
    def scaled(cls, n: int, q) -> "Lattice":
        q = Fraction(q)
        return cls([[q if i == j else 0 for j in range(n)] for i in range(n)], dim=n)

    def basis_columns(self) -> list[RatVector]:
        d = self.denominator
        return [RatVector(Fraction(x, d) for x in self.basis.col(j)) for j in range(self.dim)]

    def basis_matrix(self) -> list[list[Fraction]]:
        """Rational n x n matrix whose columns are the basis vectors."""
        d = self.denominator
        return [[Fraction(x, d) for x in self.basis.row(i)] for i in range(self.dim)]

    def coordinates(self, v: Sequence) -> RatVector:
        """Coordinates of ``v`` with respect to the (lower triangular) basis."""
        v = RatVector(v)
        d = self.denominator
        n = self.dim
        c = [Fraction(0)] * n
        for i in range(n):
            s = v[i] * d - sum(self.basis[i, j] * c[j] for j in range(i))
            c[i] = s / self.basis[i, i]
        return RatVector(c)

    def contains(self, v: Sequence) -> bool:
        return self.coordinates(v).is_integral()

    __contains__ = contains

    def is_sublattice_of(self, other: "Lattice") -> bool:
        return all(other.contains(b) for b in self.basis_columns())

    def covolume(self) -> Fraction:
        return Fraction(self.basis.det(), self.denominator ** self.dim)

    def is_standard(self) -> bool:
        return self == Lattice.standard(self.dim)

    def __eq__(self, other):
        if not isinstance(other, Lattice):
            return NotImplemented
        return (self.dim, self.denominator, self.basis) == (other.dim, other.denominator, other.basis)

    def __hash__(self):
        return hash((self.dim, self.denominator, self.basis))

    def __repr__(self):
        return f"Lattice(denominator={self.denominator}, basis={self.basis.tolist()})"


@dataclass(frozen=True)
class CongruenceSolution:
    """Solutions of ``A v = b (mod Z^m)`` for rational v.

    ``solution_lattice`` is the homogeneous solution set when it is
    discrete; when the system leaves free real directions ``discrete`` is
    False and ``solution_lattice`` is None.
    """

    solvable: bool
    particular: Optional[RatVector]
    solution_lattice: Optional[Lattice]
    discrete: bool


def solve_congruence(A: IntMatrix, b: Sequence) -> CongruenceSolution:
    m, n = A.shape
    b = RatVector(b)
    if len(b) != m:
        raise ValueError("right-hand side has wrong length")
    res = snf(A)
    d = res.divisors
    r = res.rank
    c = res.U @ b
    discrete = r == n
    lattice = None
    if discrete:
        cols = [RatVector(Fraction(x, d[j]) for x in res.V.col(j)) for j in range(n)]
        lattice = Lattice(cols, dim=n)
    if any(c[i].denominator != 1 for i in range(r, m)):
        return CongruenceSolution(False, None, lattice, discrete)
    w = RatVector([c[i] / d[i] for i in range(r)] + [0] * (n - r))
    return CongruenceSolution(True, res.V @ w, lattice, discrete)


def lattice_quotient_invariants(sup: Lattice, sub: Lattice) -> list[int]:
    """Elementary divisors (> 1) of the finite quotient ``sup / sub``."""
    if sup.dim != sub.dim:
        raise ValueError("lattice dimensions differ")
    coords = [sup.coordinates(b) for b in sub.basis_columns()]
    if not all(c.is_integral() for c in coords):
        raise NotSublatticeError("second lattice is not contained in the first")
    if sup.dim == 0:
        return []
    C = IntMatrix.from_columns([[int(x) for x in c] for c in coords])
    return [x for x in snf(C).divisors if x > 1]
