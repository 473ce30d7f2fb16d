"""Invariant quadratic forms, short vectors and integral isometries."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .exact import IntMatrix, bareiss_det, solve_integer
from .matgroup import FinMatGroup


@dataclass(frozen=True)
class SymForm:
    matrix: IntMatrix

    def __post_init__(self):
        m = self.matrix
        if not m.is_square or m != m.T:
            raise ValueError("form matrix must be square and symmetric")

    @classmethod
    def of(cls, rows) -> "SymForm":
        return cls(IntMatrix(rows))

    @property
    def dim(self) -> int:
        return self.matrix.rows

    def __getitem__(self, idx):
        return self.matrix[idx]

    def det(self) -> int:
        return self.matrix.det()

    def is_positive_definite(self) -> bool:
        rows = self.matrix.tolist()
        return all(bareiss_det([r[:k] for r in rows[:k]]) > 0 for k in range(1, self.dim + 1))

    def value(self, v: Sequence[int]) -> int:
        return sum(a * b for a, b in zip(v, self.matrix @ tuple(v)))

    def primitive(self) -> "SymForm":
        c = self.matrix.content()
        if c in (0, 1):
            return self
        return SymForm(IntMatrix.from_flat(self.dim, self.dim, (x // c for x in self.matrix.entries)))

    def transform(self, X: IntMatrix) -> "SymForm":
        """X^T Q X"""
        return SymForm(X.T @ self.matrix @ X)

    def max_diagonal(self) -> int:
        return max((self.matrix[i, i] for i in range(self.dim)), default=0)


def _sym_positions(n):
    return [(i, j) for i in range(n) for j in range(i, n)]


def _unit_form(n, i, j):
    rows = [[0] * n for _ in range(n)]
    rows[i][j] = 1
    rows[j][i] = 1
    return IntMatrix(rows)


def invariant_form_space(G: FinMatGroup) -> list[SymForm]:
    """Integral basis of the symmetric forms F with g^T F g = F on G.

    The basis spans every integral invariant form (the kernel lattice is
    saturated) and is returned in Hermite-normalised coordinates.
    """
    n = G.dim
    pos = _sym_positions(n)
    units = [_unit_form(n, i, j) for i, j in pos]
    rows = []
    for g in G.generators:
        images = [g.T @ E @ g - E for E in units]
        for i, j in pos:
            rows.append([img[i, j] for img in images])
    if not rows:
        kernel = [tuple(1 if k == l else 0 for l in range(len(pos))) for k in range(len(pos))]
    else:
        kernel = solve_integer(IntMatrix(rows), [0] * len(rows))[1]
    out = []
    for coeffs in kernel:
        m = [[0] * n for _ in range(n)]
        for c, (i, j) in zip(coeffs, pos):
            m[i][j] = c
            m[j][i] = c
        out.append(SymForm.of(m))
    return out


def average_form(G: FinMatGroup) -> SymForm:
    """Sum of g^T g over the group: a positive definite G-invariant form."""
    n = G.dim
    acc = [0] * (n * n)
    for g in G.elements:
        cols = [g.col(j) for j in range(n)]
        for i in range(n):
            ci = cols[i]
            for j in range(i, n):
                s = sum(a * b for a, b in zip(ci, cols[j]))
                acc[i * n + j] += s
                if i != j:
                    acc[j * n + i] += s
    return SymForm(IntMatrix.from_flat(n, n, acc))


def _cholesky_coefficients(Q: SymForm):
    """Rational q with Q(x) = sum_i q[i][i] (x_i + sum_{j>i} q[i][j] x_j)^2."""
    n = Q.dim
    q = [[Fraction(Q[i, j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    return q


def _enumerate(Q: SymForm, bound) -> Iterator[tuple]:
    """All nonzero x in Z^n with Q(x) <= bound (both signs), Fincke-Pohst."""
    n = Q.dim
    q = _cholesky_coefficients(Q)
    x = [0] * n
    bound = Fraction(bound)

    def rec(i, remaining):
        if i < 0:
            if any(x):
                yield tuple(x)
            return
        center = -sum(q[i][j] * x[j] for j in range(i + 1, n))
        r2 = remaining / q[i][i]
        s = math.isqrt(math.floor(r2)) + 1
        lo = math.floor(center) - s
        hi = math.ceil(center) + s
        for xi in range(lo, hi + 1):
            t = (xi - center) ** 2
            if t <= r2:
                x[i] = xi
                yield from rec(i - 1, remaining - q[i][i] * t)
        x[i] = 0

    yield from rec(n - 1, bound)


def _canonical_sign(v):
    for c in v:
        if c:
            return c > 0
    return False


def short_vectors(Q: SymForm, c: int) -> list[tuple]:
    """Nonzero v with v^T Q v <= c, one per +-pair (first nonzero entry positive), sorted."""
    if not Q.is_positive_definite():
        raise ValueError("short vector enumeration needs a positive definite form")
    return sorted(v for v in _enumerate(Q, c) if _canonical_sign(v))


def isometries(Q1: SymForm, Q2: SymForm) -> list[IntMatrix]:
    """All integral X with X^T Q1 X = Q2, found by column-wise backtracking.

    Column i of X is the image of basis vector i; its candidates are the
    vectors of Q1-norm Q2[i,i], pruned by the inner products with the
    columns already placed.
    """
    n = Q1.dim
    if Q2.dim != n or Q1.det() != Q2.det():
        return []
    if not (Q1.is_positive_definite() and Q2.is_positive_definite()):
        raise ValueError("isometry search needs positive definite forms")
    if n == 0:
        return [IntMatrix.identity(0)]
    targets = {Q2[i, i] for i in range(n)}
    by_norm: dict[int, list] = {t: [] for t in targets}
    A = Q1.matrix
    for v in _enumerate(Q1, max(targets)):
        nv = Q1.value(v)
        if nv in by_norm:
            by_norm[nv].append((v, A @ v))
    for lst in by_norm.values():
        lst.sort()

    found = []
    cols = []

    def rec(i):
        if i == n:
            found.append(IntMatrix.from_columns(cols))
            return
        for v, Av in by_norm[Q2[i, i]]:
            ok = True
            for j in range(i):
                if sum(a * b for a, b in zip(cols[j], Av)) != Q2[j, i]:
                    ok = False
                    break
            if ok:
                cols.append(v)
                rec(i + 1)
                cols.pop()

    rec(0)
    return sorted(found)
