import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from crystnorm.errors import NotSublatticeError
from crystnorm.exact import (IntMatrix, Lattice, RatVector, hnf, lattice_quotient_invariants,
                             rat_inverse, snf, solve_congruence, solve_integer)


def perm_det(rows):
    """Leibniz determinant; an oracle independent of the elimination code."""
    n = len(rows)
    total = 0
    for p in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
        term = 1
        for i in range(n):
            term *= rows[i][p[i]]
        total += -term if inv % 2 else term
    return total


def minors_gcd(rows, k):
    m, n = len(rows), len(rows[0])
    g = 0
    for I in itertools.combinations(range(m), k):
        for J in itertools.combinations(range(n), k):
            g = math.gcd(g, perm_det([[rows[i][j] for j in J] for i in I]))
    return g


def random_matrix(rng, max_dim=5, bound=50):
    m = rng.randint(1, max_dim)
    n = rng.randint(1, max_dim)
    # sprinkle zeros so low ranks occur
    return IntMatrix([[rng.randint(-bound, bound) if rng.random() > 0.3 else 0 for _ in range(n)]
                      for _ in range(m)])


def test_hnf_examples():
    assert hnf(IntMatrix.identity(2)) == (IntMatrix.identity(2), IntMatrix.identity(2))
    H, U = hnf(IntMatrix([[2, 6], [4, 8]]))
    assert H == IntMatrix([[2, 2], [0, 4]])
    assert U @ IntMatrix([[2, 6], [4, 8]]) == H
    assert hnf(IntMatrix([[0, 0], [0, 0]]))[0].is_zero()


def test_snf_examples():
    assert snf(IntMatrix.identity(3)).D == IntMatrix.identity(3)
    assert snf(IntMatrix([[2, 4], [6, 8]])).divisors == [2, 4]
    assert snf(IntMatrix([[2, 0], [0, 3]])).divisors == [1, 6]


def check_hnf(A):
    H, U = hnf(A)
    assert U.is_unimodular()
    assert U @ A == H
    prev = -1
    for i in range(H.rows):
        row = H.row(i)
        nz = [j for j, x in enumerate(row) if x]
        if not nz:
            assert all(not any(H.row(k)) for k in range(i, H.rows))
            break
        p = nz[0]
        assert p > prev and row[p] > 0
        for k in range(i):
            assert 0 <= H[k, p] < row[p]
        prev = p


def check_snf(A, with_minors):
    r = snf(A)
    assert r.U.is_unimodular() and r.V.is_unimodular()
    assert r.U @ A @ r.V == r.D
    d = r.divisors
    for i in range(r.D.rows):
        for j in range(r.D.cols):
            if i != j:
                assert r.D[i, j] == 0
    assert all(x >= 0 for x in d)
    for a, b in zip(d, d[1:]):
        assert (b == 0) if a == 0 else b % a == 0
    if with_minors:
        prod = 1
        rows = A.tolist()
        for k in range(1, min(A.shape) + 1):
            prod *= d[k - 1]
            assert prod == minors_gcd(rows, k)


def test_hnf_snf_random_1000():
    rng = random.Random(1)
    for t in range(1000):
        A = random_matrix(rng)
        check_hnf(A)
        check_snf(A, with_minors=t % 4 == 0)


def test_det_and_inverse_against_oracles():
    rng = random.Random(2)
    for _ in range(300):
        n = rng.randint(1, 4)
        A = IntMatrix([[rng.randint(-6, 6) for _ in range(n)] for _ in range(n)])
        assert A.det() == perm_det(A.tolist())
    X = IntMatrix([[2, 1, 0], [1, 1, 0], [0, 0, -1]])
    assert X @ X.inverse() == IntMatrix.identity(3)
    assert [list(r) for r in rat_inverse([[2, 0], [0, 4]])] == [[Fraction(1, 2), 0], [0, Fraction(1, 4)]]


@given(st.lists(st.integers(-9, 9), min_size=4, max_size=4), st.lists(st.integers(-9, 9), min_size=4, max_size=4))
@settings(max_examples=200, deadline=None)
def test_det_multiplicative(a, b):
    A = IntMatrix([a[:2], a[2:]])
    B = IntMatrix([b[:2], b[2:]])
    assert (A @ B).det() == A.det() * B.det()


def test_solve_integer_examples():
    x, ker = solve_integer(IntMatrix.identity(2), (3, 5))
    assert x == (3, 5) and ker == []
    assert solve_integer(IntMatrix([[2, 0], [0, 2]]), (1, 0)) is None
    x, ker = solve_integer(IntMatrix([[1, 1]]), (2,))
    assert sum(x) == 2 and ker == [(1, -1)]


def test_solve_integer_random():
    rng = random.Random(3)
    for _ in range(200):
        A = random_matrix(rng, 4, 6)
        x0 = [rng.randint(-5, 5) for _ in range(A.cols)]
        b = A @ tuple(x0)
        x, ker = solve_integer(A, b)
        assert A @ tuple(x) == b
        for k in ker:
            assert not any(A @ tuple(k))
        assert len(ker) == A.cols - snf(A).rank


def test_congruence_examples():
    s = solve_congruence(IntMatrix([[2, 0], [0, 2]]), [Fraction(1, 2), 0])
    assert s.solvable and s.particular == RatVector([Fraction(1, 4), 0])
    assert s.solution_lattice == Lattice.scaled(2, Fraction(1, 2))
    s = solve_congruence(IntMatrix.zeros(2, 2), [1, 0])
    assert s.solvable and s.particular == RatVector.zero(2) and not s.discrete
    assert not solve_congruence(IntMatrix.zeros(1, 1), [Fraction(1, 3)]).solvable


def _independent_columns(A):
    cols = []
    for j in range(A.cols):
        trial = cols + [j]
        sub = [[A[i, c] for c in trial] for i in range(A.rows)]
        if any(perm_det([sub[i] for i in I]) for I in itertools.combinations(range(A.rows), len(trial))):
            cols = trial
    return cols


def _brute_congruence(A, b, limit=3000):
    """All v in (1/M)Z^n / Z^n with A v = b mod Z^m, restricted to independent columns."""
    cols = _independent_columns(A)
    r = len(cols)
    den_b = 1
    for x in b:
        den_b = math.lcm(den_b, Fraction(x).denominator)
    if r == 0:
        return cols, 1, [()] if all(Fraction(x).denominator == 1 for x in b) else []
    minor = next(abs(perm_det([[A[i, c] for c in cols] for i in I]))
                 for I in itertools.combinations(range(A.rows), r)
                 if perm_det([[A[i, c] for c in cols] for i in I]))
    M = den_b * minor
    if M ** r > limit:
        return cols, M, None
    sols = []
    for w in itertools.product(range(M), repeat=r):
        v = [Fraction(x, M) for x in w]
        ok = all((sum(A[i, c] * v[k] for k, c in enumerate(cols)) - b[i]).denominator == 1
                 for i in range(A.rows))
        if ok:
            sols.append(tuple(v))
    return cols, M, sols


def test_congruence_vs_brute_force_200():
    rng = random.Random(4)
    done = 0
    while done < 200:
        n = rng.randint(1, 3)
        m = rng.randint(1, 3)
        A = IntMatrix([[rng.randint(-3, 3) for _ in range(n)] for _ in range(m)])
        b = [Fraction(rng.randint(-3, 3), rng.choice([1, 2, 3, 4])) for _ in range(m)]
        cols, M, sols = _brute_congruence(A, b)
        if sols is None:
            continue
        done += 1
        s = solve_congruence(A, b)
        assert s.solvable == bool(sols), (A, b)
        if s.solvable:
            assert all((x - y).denominator == 1 for x, y in zip(A @ s.particular, b))
        assert s.discrete == (len(cols) == n)
        if s.discrete and s.solvable:
            # solutions mod Z^n are exactly particular + L, and |L / Z^n| of them
            L = s.solution_lattice
            assert len(sols) * L.covolume() == 1
            for v in sols:
                assert L.contains(RatVector(v) - s.particular)


def test_lattice_canonical_form():
    a = Lattice([[1, 0], [0, 1]])
    b = Lattice([[1, 1], [0, 1], [3, 5]])
    assert a == b and hash(a) == hash(b)
    c = Lattice([[Fraction(1, 2), 0], [0, 1]])
    assert c.denominator == 2 and c.covolume() == Fraction(1, 2)
    assert a.is_sublattice_of(c) and not c.is_sublattice_of(a)
    rng = random.Random(5)
    for _ in range(100):
        gens = [[Fraction(rng.randint(-6, 6), rng.choice([1, 2, 3])) for _ in range(2)] for _ in range(3)]
        try:
            L = Lattice(gens)
        except ValueError:
            continue
        shuffled = gens[:]
        rng.shuffle(shuffled)
        combo = [RatVector(shuffled[0]) + RatVector(shuffled[1])] + shuffled
        assert Lattice(combo) == L
        for g in gens:
            assert L.contains(g)


def test_quotient_invariants():
    assert lattice_quotient_invariants(Lattice.standard(3), Lattice.standard(3)) == []
    assert lattice_quotient_invariants(Lattice.scaled(2, Fraction(1, 2)), Lattice.standard(2)) == [2, 2]
    assert lattice_quotient_invariants(Lattice.scaled(1, Fraction(1, 6)), Lattice.standard(1)) == [6]
    with pytest.raises(NotSublatticeError):
        lattice_quotient_invariants(Lattice.standard(2), Lattice.scaled(2, Fraction(1, 2)))
