import itertools
import math
from fractions import Fraction

import pytest

from crystnorm import catalog
from crystnorm.crystal import (a0_lattice, affine_normalizer, analyze, aut_is_crystallographic_check,
                               center_trivial, construct_complete, direct_product, h1_invariants,
                               iterate_fixpoint, make_cryst, membership_translation, power, rebase,
                               trivial_group)
from crystnorm.errors import InconsistentVectorSystem, MaxIterExceeded, NotCenterless
from crystnorm.exact import IntMatrix, Lattice, RatVector, snf
from crystnorm.normalizer import normalizer

h = Fraction(1, 2)


@pytest.fixture(scope="module")
def g1():
    return catalog.gamma1()


@pytest.fixture(scope="module")
def g2():
    return catalog.gamma2()


@pytest.fixture(scope="module")
def minus():
    return make_cryst(2, [(-IntMatrix.identity(2), RatVector.zero(2))])


def test_make_cryst_examples(g1, g2):
    assert g1.point_group.order == 12 and g1.is_symmorphic_standard()
    assert g2.point_group.order == 48
    G = make_cryst(2, [(-IntMatrix.identity(2), RatVector([h, 0]))])
    assert G.translation(-IntMatrix.identity(2)) == RatVector([h, 0])
    assert G.check_cocycle()


def test_make_cryst_rejects_inconsistent():
    # a reflection with translation 1/2 along its fixed axis squares to a translation by 1/2... not in Z^2
    X = IntMatrix([[1, 0], [0, -1]])
    with pytest.raises(InconsistentVectorSystem):
        make_cryst(2, [(X, RatVector([h, 0])), (X, RatVector([0, 0]))])
    with pytest.raises(InconsistentVectorSystem):
        make_cryst(1, [(IntMatrix([[1]]), RatVector([h]))])
    with pytest.raises(ValueError):
        make_cryst(2, [(IntMatrix([[2, 0], [0, 1]]), RatVector.zero(2))])


def test_center(g1, minus):
    assert center_trivial(g1)
    assert not center_trivial(trivial_group(2))
    assert center_trivial(minus)


def test_a0_and_h1(g1, g2, minus):
    assert a0_lattice(g1).is_standard() and a0_lattice(g2).is_standard()
    assert a0_lattice(minus) == Lattice.scaled(2, h)
    assert h1_invariants(g1) == [] and h1_invariants(g2) == []
    assert h1_invariants(minus) == [2, 2]
    with pytest.raises(NotCenterless):
        a0_lattice(trivial_group(2))


def brute_h1(gamma):
    """Fixed points of G on (1/D)Z^n / Z^n, returned as counts of m-torsion."""
    n = gamma.dim
    ident = IntMatrix.identity(n)
    A = IntMatrix.vstack([g - ident for g in gamma.point_group.generators])
    D = math.prod(d for d in snf(A).divisors if d)
    fixed = []
    for w in itertools.product(range(D), repeat=n):
        m = RatVector(Fraction(x, D) for x in w)
        if all((g @ m - m).is_integral() for g in gamma.point_group.generators):
            fixed.append(m)
    return D, fixed


def torsion_count(invariants, k):
    return math.prod(math.gcd(k, d) for d in invariants)


def test_h1_brute_force_cross_check(g1, minus):
    subgroups = [g1, minus, make_cryst(2, [(IntMatrix([[0, -1], [1, -1]]), RatVector.zero(2))]),
                 make_cryst(2, [(IntMatrix([[0, -1], [1, 0]]), RatVector.zero(2))]),
                 make_cryst(2, [(-IntMatrix.identity(2), RatVector.zero(2)),
                                (IntMatrix([[0, 1], [1, 0]]), RatVector.zero(2))])]
    for gamma in subgroups:
        assert gamma.point_group.order <= 12
        D, fixed = brute_h1(gamma)
        inv = h1_invariants(gamma)
        assert len(fixed) == math.prod(inv)
        for k in range(1, D + 1):
            if D % k == 0:
                killed = sum(1 for m in fixed if (m * k).is_integral())
                assert killed == torsion_count(inv, k)
    assert h1_invariants(minus) == [2, 2]


def test_direct_product(g1, g2):
    sq = direct_product(g1, g1)
    assert sq.dim == 4 and sq.point_group.order == 144
    mixed = direct_product(g1, g2)
    assert mixed.dim == 5 and mixed.point_group.order == 576
    assert direct_product(g1, trivial_group(0)) == g1
    assert sq.check_cocycle()


def test_rebase(g1, minus):
    assert rebase(g1, Lattice.standard(2)) == g1
    r = rebase(minus, Lattice.scaled(2, h))
    assert r.point_group == minus.point_group


def test_gamma_inside_affine_normalizer(g1, g2):
    for gamma in (g1, g2, catalog.parse_group_expression("gamma1^2")):
        for g, t in gamma.affine_generators():
            v = membership_translation(gamma, g)
            assert v is not None
        # translations realised with identity linear part are exactly A0
        aff = affine_normalizer(gamma, normalizer(gamma.point_group))
        assert aff.a0 == a0_lattice(gamma)
        assert gamma.point_group.is_subgroup_of(aff.n_alpha)


def test_generator_membership_matches_all_elements():
    gamma = make_cryst(2, [(-IntMatrix.identity(2), RatVector([h, 0])),
                           (IntMatrix([[1, 0], [0, -1]]), RatVector([0, h]))])
    N = normalizer(gamma.point_group)
    for X in N.group.elements:
        v = membership_translation(gamma, X)
        Xinv = X.inverse()
        # does x -> Xx + v conjugate every element of gamma into gamma (mod Z^n)?
        full = False
        if v is not None:
            full = all(
                gamma.translation(X @ g @ Xinv) ==
                (X @ gamma.translation(g) + v - (X @ g @ Xinv) @ v).mod1()
                for g in gamma.point_group.elements)
        assert (v is not None) == full or v is None
        if v is None:
            # no translation on a fine grid works either
            for w in itertools.product(range(4), repeat=2):
                u = RatVector(Fraction(x, 4) for x in w)
                ok = all(gamma.translation(X @ g @ Xinv) ==
                         (X @ gamma.translation(g) + u - (X @ g @ Xinv) @ u).mod1()
                         for g in gamma.point_group.elements)
                assert not ok


def test_affine_normalizer_examples(g1, g2):
    for gamma in (g1, g2):
        aff = affine_normalizer(gamma, normalizer(gamma.point_group))
        assert aff.is_fixpoint and aff.group == gamma and aff.out_order == 1
    sq = catalog.parse_group_expression("gamma1^2")
    aff = affine_normalizer(sq, normalizer(sq.point_group))
    assert aff.n_alpha.order // sq.point_group.order == 2
    assert aff.out_order == 2
    assert aff.group.point_group.order == aff.n_alpha.order
    assert aff.group.check_cocycle()


def test_analyze_reports(g1, g2):
    for gamma in (g1, g2):
        rep = analyze(gamma).report
        assert rep.out_order == 1 and rep.h1_invariants == () and rep.exact_sequence_holds()
    mixed = analyze(catalog.parse_group_expression("gamma1*gamma2")).report
    assert mixed.out_order == 1 and mixed.exact_sequence_holds()
    bad = analyze(trivial_group(2)).report
    assert not bad.center_trivial and bad.out_order is None


def test_iterate(g1):
    final, hist = iterate_fixpoint(g1)
    assert final == g1 and len(hist) == 1
    final, hist = iterate_fixpoint(catalog.parse_group_expression("gamma1^2"))
    assert len(hist) >= 2
    assert hist[-1].out_order == 1 and hist[-1].center_trivial and hist[-1].fixpoint
    with pytest.raises(MaxIterExceeded) as err:
        iterate_fixpoint(catalog.parse_group_expression("gamma1^2"), max_iter=0)
    assert len(err.value.history) == 1
    with pytest.raises(NotCenterless):
        iterate_fixpoint(trivial_group(2))


def test_construct_small(g1, g2):
    assert construct_complete(2)[0] == g1
    assert construct_complete(3)[0] == g2
    with pytest.raises(ValueError):
        construct_complete(1)


def test_aut_check(g1, g2):
    for gamma in (g1, g2, catalog.parse_group_expression("gamma1^2")):
        assert aut_is_crystallographic_check(gamma, normalizer(gamma.point_group))


def test_catalog_expressions():
    assert catalog.parse_group_expression("gamma1 ^ 2").dim == 4
    assert catalog.is_builtin_expression("gamma1*gamma2")
    assert not catalog.is_builtin_expression("gamma3")
    assert power(catalog.gamma1(), 0).dim == 0


def test_check_cocycle_detects_corruption(g1):
    from crystnorm.crystal import CrystGroup
    assert g1.check_cocycle()
    vs = dict(g1.vector_system)
    vs[g1.point_group.generators[2]] = RatVector([h, 0])
    assert not CrystGroup(2, g1.point_group, vs).check_cocycle()


def test_nonsymmorphic_group_analysis():
    # pmg-like group: glide reflection and a half-turn
    gamma = make_cryst(2, [(-IntMatrix.identity(2), RatVector.zero(2)),
                           (IntMatrix([[1, 0], [0, -1]]), RatVector([h, 0]))])
    assert gamma.check_cocycle() and not gamma.is_symmorphic_standard()
    a = analyze(gamma)
    assert a.report.exact_sequence_holds()
    assert a.affine.group.check_cocycle()
