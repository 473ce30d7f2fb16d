"""Crystallographic groups as point group plus vector system.

A group is stored in the basis of its translation lattice, which is
therefore Z^n.  Each point-group element g carries a translation part
t_g, kept modulo Z^n with entries in [0, 1).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .errors import (InconsistentVectorSystem, MaxIterExceeded, NonIntegralRebase,
                     NormalizerNotFinite, NotCenterless)
from .exact import (IntMatrix, Lattice, RatVector, lattice_quotient_invariants,
                    rat_inverse, rat_rank, solve_congruence)
from .matgroup import DEFAULT_MAX_ORDER, FinMatGroup, closure
from .normalizer import (INFINITE, NormalizerConfig, NormalizerResult, normalizer)

log = logging.getLogger(__name__)

AffineGen = tuple  # (IntMatrix, RatVector)


@dataclass(frozen=True, eq=False)
class CrystGroup:
    dim: int
    point_group: FinMatGroup
    vector_system: Mapping[IntMatrix, RatVector] = field(repr=False)

    def translation(self, g: IntMatrix) -> RatVector:
        return self.vector_system[g]

    def affine_generators(self) -> list[AffineGen]:
        return [(g, self.vector_system[g]) for g in self.point_group.generators]

    def is_symmorphic_standard(self) -> bool:
        """True when every translation part is zero (the split extension G ⋉ Z^n)."""
        return all(not any(t) for t in self.vector_system.values())

    def check_cocycle(self) -> bool:
        """t_gh = t_g + g t_h mod Z^n over all pairs (quadratic in |G|)."""
        elems = self.point_group.elements
        n = self.dim
        if n == 0:
            return True
        den = 1
        for t in self.vector_system.values():
            den = math.lcm(den, t.denominator())
        E = np.array([g.tolist() for g in elems], dtype=np.int64)
        T = np.array([[int(x * den) for x in self.vector_system[g]] for g in elems], dtype=np.int64)
        index = {row.tobytes(): k for k, row in enumerate(E.reshape(len(elems), -1))}
        for k in range(len(elems)):
            prods = (E[k] @ E).reshape(len(elems), -1)
            try:
                idx = np.array([index[row.tobytes()] for row in prods])
            except KeyError:
                return False
            rhs = (T[k] + T @ E[k].T) % den
            if not np.array_equal(T[idx], rhs):
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, CrystGroup):
            return NotImplemented
        return (self.dim == other.dim and self.point_group == other.point_group
                and dict(self.vector_system) == dict(other.vector_system))

    def __hash__(self):
        return hash((self.dim, self.point_group.elements))

    def __repr__(self):
        return f"CrystGroup(dim={self.dim}, point_group_order={self.point_group.order})"


def make_cryst(dim: int, affine_gens: Sequence[AffineGen],
               max_order: int = DEFAULT_MAX_ORDER) -> CrystGroup:
    """Build the group generated by ``affine_gens`` and Z^n.

    Translation parts are pushed along every product ``element * generator``;
    reaching a linear part twice with translations that differ mod Z^n
    raises InconsistentVectorSystem (the lattice would not be Z^n).
    """
    gens = []
    for k, (g, t) in enumerate(affine_gens):
        g = g if isinstance(g, IntMatrix) else IntMatrix(g)
        t = RatVector(t)
        if g.shape != (dim, dim) or len(t) != dim:
            raise ValueError(f"generator {k} has wrong dimension")
        if g.det() not in (1, -1):
            raise ValueError(f"generator {k}: linear part is not unimodular")
        gens.append((g, t.mod1()))

    P = closure([g for g, _ in gens], max_order=max_order, dim=dim)
    first = {}
    for g, t in gens:
        first.setdefault(g, t)
    core = [(g, first[g]) for g in P.generators]

    # translations as integer numerators over a common denominator
    den = 1
    for _, t in gens:
        den = math.lcm(den, t.denominator())

    def num(t):
        return tuple(int(x * den) for x in t)

    def show(t):
        return [str(Fraction(x, den)) for x in t]

    ident = IntMatrix.identity(dim)
    vs = {ident: (0,) * dim}
    core_num = [(s, num(u)) for s, u in core]
    queue = [ident]
    for e in queue:
        te = vs[e]
        for s, u in core_num:
            p = e @ s
            tp = tuple((a + b) % den for a, b in zip(te, e @ u))
            old = vs.get(p)
            if old is None:
                vs[p] = tp
                queue.append(p)
            elif old != tp:
                raise InconsistentVectorSystem(
                    f"linear part {p.tolist()} reached with translations {show(old)} and {show(tp)}")
    for g, t in gens:
        if vs[g] != num(t):
            raise InconsistentVectorSystem(
                f"generator {g.tolist()} has translation {show(num(t))}, "
                f"but the other generators force {show(vs[g])}")
    vector_system = {g: RatVector(Fraction(x, den) for x in t) for g, t in vs.items()}
    return CrystGroup(dim, P, vector_system)


def trivial_group(dim: int) -> CrystGroup:
    """The translation group Z^n itself."""
    return make_cryst(dim, [])


def center_trivial(gamma: CrystGroup) -> bool:
    n = gamma.dim
    if n == 0:
        return True
    ident = IntMatrix.identity(n)
    rows = [list((g - ident).row(i)) for g in gamma.point_group.generators for i in range(n)]
    return rat_rank(rows) == n


def _stacked_minus_identity(gamma: CrystGroup) -> IntMatrix:
    ident = IntMatrix.identity(gamma.dim)
    return IntMatrix.vstack([g - ident for g in gamma.point_group.generators])


def a0_lattice(gamma: CrystGroup) -> Lattice:
    """The lattice of m in Q^n with g m - m integral for every g."""
    if not center_trivial(gamma):
        raise NotCenterless("the group has nontrivial center; A0 is not discrete")
    n = gamma.dim
    if n == 0:
        return Lattice.standard(0)
    A = _stacked_minus_identity(gamma)
    sol = solve_congruence(A, [0] * A.rows)
    return sol.solution_lattice


def h1_invariants(gamma: CrystGroup) -> list[int]:
    return lattice_quotient_invariants(a0_lattice(gamma), Lattice.standard(gamma.dim))


def rebase(source: Union[CrystGroup, Sequence[AffineGen]], lattice: Lattice,
           max_order: int = DEFAULT_MAX_ORDER) -> CrystGroup:
    """Rewrite a group in the basis B of ``lattice``: g -> B^-1 g B, t -> B^-1 t."""
    gens = source.affine_generators() if isinstance(source, CrystGroup) else list(source)
    n = lattice.dim
    B = lattice.basis_matrix()
    Binv = rat_inverse(B) if n else []
    out = []
    for X, v in gens:
        XB = [[sum(X[i, k] * B[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        Y = [[sum(Binv[i][k] * XB[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        if any(y.denominator != 1 for r in Y for y in r):
            raise NonIntegralRebase(f"{X.tolist()} does not preserve the lattice")
        w = RatVector(sum(Binv[i][k] * v[k] for k in range(n)) for i in range(n))
        Ym = IntMatrix(Y)
        if Ym.det() not in (1, -1):
            raise NonIntegralRebase(f"rebased {X.tolist()} is not unimodular")
        out.append((Ym, w))
    return make_cryst(n, out, max_order=max_order)


def direct_product(a: CrystGroup, b: CrystGroup) -> CrystGroup:
    na, nb = a.dim, b.dim
    Ia, Ib = IntMatrix.identity(na), IntMatrix.identity(nb)
    gens = [(IntMatrix.block_diag(g, Ib), RatVector(tuple(t) + (0,) * nb))
            for g, t in a.affine_generators()]
    gens += [(IntMatrix.block_diag(Ia, h), RatVector((0,) * na + tuple(t)))
             for h, t in b.affine_generators()]
    max_order = max(DEFAULT_MAX_ORDER, a.point_group.order * b.point_group.order)
    return make_cryst(na + nb, gens, max_order=max_order)


def power(gamma: CrystGroup, k: int) -> CrystGroup:
    out = trivial_group(0)
    for _ in range(k):
        out = direct_product(out, gamma)
    return out


@dataclass(frozen=True)
class AffNormalizerResult:
    """A(Γ) rebased to its own translation lattice, with the pieces that built it."""

    group: CrystGroup
    n_alpha: FinMatGroup
    a0: Lattice
    rebase_matrix: list
    source_point_group_order: int

    @property
    def is_fixpoint(self) -> bool:
        return self.n_alpha.order == self.source_point_group_order and self.a0.is_standard()

    @property
    def out_order(self) -> int:
        """Index of Γ in A(Γ), counted on the rebased group.

        |A(Γ)/Z^n| = |point group of A(Γ)| * [A0 : Z^n] and [A0 : Z^n] is
        the reciprocal covolume of A0.
        """
        idx = Fraction(self.group.point_group.order) / (self.source_point_group_order * self.a0.covolume())
        if idx.denominator != 1:
            raise AssertionError(f"non-integral index {idx}")
        return int(idx)


def _coset_representatives(N: FinMatGroup, G: FinMatGroup) -> list[IntMatrix]:
    """One element per left coset XG, found by a walk on N/G with N's generators."""
    ident = IntMatrix.identity(N.dim)
    reps = [ident]
    inverses = [ident]
    frontier = [ident]
    while frontier:
        nxt = []
        for r in frontier:
            for s in N.generators:
                x = s @ r
                if any((ri @ x) in G for ri in inverses):
                    continue
                reps.append(x)
                inverses.append(x.inverse())
                nxt.append(x)
        frontier = nxt
    if len(reps) * G.order != N.order:
        raise AssertionError("coset walk did not cover the normalizer")
    return reps


def membership_translation(gamma: CrystGroup, X: IntMatrix) -> Optional[RatVector]:
    """A v with x -> Xx + v normalizing Γ, or None when no such v exists.

    X must normalize the point group.  The condition, for each generator g
    with g' = X g X^-1, is (I - g') v = t_g' - X t_g (mod Z^n).
    """
    n = gamma.dim
    if n == 0:
        return RatVector()
    G = gamma.point_group
    Xinv = X.inverse()
    ident = IntMatrix.identity(n)
    blocks = []
    rhs = []
    for g in G.generators:
        gp = X @ g @ Xinv
        if gp not in G:
            raise ValueError("matrix does not normalize the point group")
        blocks.append(ident - gp)
        rhs.extend(gamma.translation(gp) - X @ gamma.translation(g))
    if not blocks:
        return RatVector.zero(n)
    sol = solve_congruence(IntMatrix.vstack(blocks), rhs)
    return sol.particular if sol.solvable else None


def affine_normalizer(gamma: CrystGroup, N: NormalizerResult,
                      max_order: int = DEFAULT_MAX_ORDER) -> AffNormalizerResult:
    """The affine normalizer A(Γ) of a centerless group.

    Linear parts range over the normalizer N of the point group; X is
    realised iff the congruence in :func:`membership_translation` is
    solvable.  G lies in that set, so one test per coset of G in N decides
    the whole coset.
    """
    if not center_trivial(gamma):
        raise NotCenterless("affine normalizer needs a centerless group")
    if N is None or not N.is_finite:
        raise NormalizerNotFinite("normalizer of the point group is not known to be finite")
    G = gamma.point_group
    L = a0_lattice(gamma)

    realised = []
    union = 0
    for X in _coset_representatives(N.group, G):
        v = membership_translation(gamma, X)
        if v is not None:
            realised.append(X)
            union += G.order
    n_alpha = closure(list(G.generators) + realised, max_order=max(max_order, N.group.order), dim=gamma.dim)
    if n_alpha.order != union:
        raise AssertionError("realisable linear parts do not form a group")

    gens = []
    for X in n_alpha.generators:
        v = gamma.translation(X) if X in G else membership_translation(gamma, X)
        gens.append((X, v))
    group = rebase(gens, L, max_order=max(max_order, n_alpha.order))
    return AffNormalizerResult(group, n_alpha, L, L.basis_matrix(), G.order)


def out_order(gamma: CrystGroup, N: NormalizerResult) -> int:
    return affine_normalizer(gamma, N).out_order


@dataclass(frozen=True)
class AnalysisReport:
    dim: int
    point_group_order: int
    center_trivial: bool
    h1_invariants: Optional[tuple] = None
    normalizer_order: Optional[int] = None
    normalizer_status: Optional[str] = None
    normalizer_backend: Optional[str] = None
    n_alpha_order: Optional[int] = None
    out_order: Optional[int] = None
    out_trivial: Optional[bool] = None
    fixpoint: Optional[bool] = None

    @property
    def h1_order(self) -> Optional[int]:
        if self.h1_invariants is None:
            return None
        k = 1
        for d in self.h1_invariants:
            k *= d
        return k

    def exact_sequence_holds(self) -> bool:
        """out * |G| == |H^1| * |N_alpha| (bottom row of the affine diagram)."""
        if self.out_order is None:
            return False
        return self.out_order * self.point_group_order == self.h1_order * self.n_alpha_order


@dataclass(frozen=True)
class Analysis:
    report: AnalysisReport
    normalizer: Optional[NormalizerResult]
    affine: Optional[AffNormalizerResult]


def analyze(gamma: CrystGroup, config: Optional[NormalizerConfig] = None) -> Analysis:
    config = config or NormalizerConfig()
    n = gamma.dim
    order = gamma.point_group.order
    if not center_trivial(gamma):
        return Analysis(AnalysisReport(n, order, False), None, None)
    h1 = tuple(h1_invariants(gamma))
    try:
        N = normalizer(gamma.point_group, config)
    except NormalizerNotFinite:
        N = NormalizerResult(None, INFINITE, config.backend, None)
    if not N.is_finite:
        rep = AnalysisReport(n, order, True, h1, None, N.status, N.backend)
        return Analysis(rep, N, None)
    aff = affine_normalizer(gamma, N, max_order=config.max_order)
    out = aff.out_order
    rep = AnalysisReport(n, order, True, h1, N.order, N.status, N.backend,
                         aff.n_alpha.order, out, out == 1, aff.is_fixpoint)
    return Analysis(rep, N, aff)


def iterate_fixpoint(gamma: CrystGroup, max_iter: int = 10,
                     config: Optional[NormalizerConfig] = None):
    """Replace Γ by A(Γ) until A(Γ) = Γ.

    Returns ``(final_group, history)`` where ``history[i]`` is the report
    for the i-th group, so ``len(history) - 1`` steps were taken.
    """
    history = []
    analyses = []
    current = gamma
    for step in range(max_iter + 1):
        if not center_trivial(current):
            raise NotCenterless(f"step {step}: group has nontrivial center")
        a = analyze(current, config)
        history.append(a.report)
        analyses.append(a)
        if a.affine is None:
            raise NormalizerNotFinite(f"step {step}: normalizer status {a.report.normalizer_status}")
        log.info("step %d: |G|=%d |N|=%d |N_alpha|=%d H1=%s out=%d", step,
                 a.report.point_group_order, a.report.normalizer_order,
                 a.report.n_alpha_order, list(a.report.h1_invariants), a.report.out_order)
        if a.affine.is_fixpoint:
            return current, history
        if step == max_iter:
            break
        current = a.affine.group
    raise MaxIterExceeded(history)


def construct_complete(n: int, config: Optional[NormalizerConfig] = None, max_iter: int = 10):
    """Centerless group with trivial Out in dimension n, via n = 2k + 3i."""
    from .catalog import gamma1, gamma2

    if n < 2:
        raise ValueError("dimension must be at least 2")
    i = n % 2
    k = (n - 3 * i) // 2
    start = direct_product(power(gamma1(), k), power(gamma2(), i))
    return iterate_fixpoint(start, max_iter, config)


def aut_is_crystallographic_check(gamma: CrystGroup, N: NormalizerResult) -> bool:
    """Consistency of "Out finite" with "A(Γ) crystallographic" on the data at hand."""
    if not center_trivial(gamma):
        raise NotCenterless("check applies to centerless groups")
    out_finite = N is not None and N.is_finite
    if not out_finite:
        return True  # no finite point group for A(Γ) can be exhibited either
    aff = affine_normalizer(gamma, N)
    n = gamma.dim
    lattice_ok = aff.a0.dim == n and Lattice.standard(n).is_sublattice_of(aff.a0)
    point_ok = all(g.is_unimodular() for g in aff.group.point_group.generators)
    contains_gamma = all(membership_translation(gamma, g) is not None
                         for g in gamma.point_group.generators)
    aff_cryst = lattice_ok and point_ok and contains_gamma
    return out_finite == aff_cryst
