"""Finite subgroups of GL(n, Z)."""

from __future__ import annotations

import bisect
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import OrderCapExceeded
from .exact import IntMatrix

DEFAULT_MAX_ORDER = 20000


@dataclass(frozen=True, eq=False)
class FinMatGroup:
    """A finite matrix group with its full, lexicographically sorted element list."""

    dim: int
    generators: tuple
    elements: tuple
    _index: frozenset = field(repr=False, compare=False, default=frozenset())

    def __post_init__(self):
        if not self._index:
            object.__setattr__(self, "_index", frozenset(self.elements))

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, X):
        return X in self._index

    def identity(self) -> IntMatrix:
        return IntMatrix.identity(self.dim)

    def is_subgroup_of(self, other: "FinMatGroup") -> bool:
        return self.dim == other.dim and all(g in other for g in self.elements)

    def same_elements(self, other: "FinMatGroup") -> bool:
        return self.dim == other.dim and self.elements == other.elements

    def __eq__(self, other):
        if not isinstance(other, FinMatGroup):
            return NotImplemented
        return self.same_elements(other)

    def __hash__(self):
        return hash((self.dim, self.elements))

    def __repr__(self):
        return f"FinMatGroup(dim={self.dim}, order={self.order}, ngens={len(self.generators)})"


def _check_gens(gens, dim):
    for g in gens:
        if not g.is_square or g.rows != dim:
            raise ValueError(f"generator of shape {g.shape} in dimension {dim}")
        if g.det() not in (1, -1):
            raise ValueError(f"generator {g.tolist()} is not unimodular")


def closure(gens: Iterable[IntMatrix], max_order: int = DEFAULT_MAX_ORDER,
            dim: Optional[int] = None) -> FinMatGroup:
    """Group generated by ``gens`` (Dimino's algorithm).

    Generators already contained in the group built so far are dropped, so
    ``generators`` of the result is an irredundant prefix-filtered list.
    Raises OrderCapExceeded as soon as the order would pass ``max_order``.
    """
    gens = list(gens)
    if dim is None:
        if not gens:
            raise ValueError("dimension needed for an empty generator list")
        dim = gens[0].rows
    _check_gens(gens, dim)

    ident = IntMatrix.identity(dim)
    elements = [ident]
    seen = {ident}
    used = []
    for s in gens:
        if s in seen:
            continue
        used.append(s)
        prev = list(elements)
        reps = [ident]

        def add_coset(r):
            for h in prev:
                e = h @ r
                seen.add(e)
                elements.append(e)
            if len(elements) > max_order:
                raise OrderCapExceeded(max_order)

        add_coset(s)
        reps.append(s)
        pos = 1
        while pos < len(reps):
            r = reps[pos]
            for t in used:
                e = r @ t
                if e not in seen:
                    reps.append(e)
                    add_coset(e)
            pos += 1
    return FinMatGroup(dim, tuple(used), tuple(sorted(elements)), frozenset(seen))


def from_closed_elements(dim: int, generators: Sequence[IntMatrix],
                         elements: Iterable[IntMatrix]) -> FinMatGroup:
    """Wrap an element set already known to be a group (no closure work)."""
    elems = tuple(sorted(set(elements)))
    return FinMatGroup(dim, tuple(generators), elems)


def contains(G: FinMatGroup, X: IntMatrix) -> bool:
    if X.shape != (G.dim, G.dim):
        raise ValueError("dimension mismatch")
    i = bisect.bisect_left(G.elements, X)
    return i < len(G.elements) and G.elements[i] == X


def conjugate_element(X: IntMatrix, g: IntMatrix, Xinv: Optional[IntMatrix] = None) -> IntMatrix:
    if Xinv is None:
        Xinv = X.inverse()
    return X @ g @ Xinv


def normalizes(G: FinMatGroup, X: IntMatrix, Xinv: Optional[IntMatrix] = None) -> bool:
    """True iff X g X^-1 lies in G for every generator g."""
    if Xinv is None:
        Xinv = X.inverse()
    return all((X @ g @ Xinv) in G for g in G.generators)


def conjugate_group(G: FinMatGroup, X: IntMatrix) -> FinMatGroup:
    Xinv = X.inverse()
    gens = [X @ g @ Xinv for g in G.generators]
    return FinMatGroup(G.dim, tuple(gens), tuple(sorted(X @ g @ Xinv for g in G.elements)))


def element_order(g: IntMatrix, limit: int = 10 ** 6) -> int:
    ident = IntMatrix.identity(g.rows)
    x = g
    k = 1
    while x != ident:
        x = x @ g
        k += 1
        if k > limit:
            raise OrderCapExceeded(limit, "element order exceeds limit")
    return k


def derived_subgroup(G: FinMatGroup) -> FinMatGroup:
    """Normal closure of the commutators of the generators."""
    inv = {g: g.inverse() for g in G.generators}
    comms = [a @ b @ inv[a] @ inv[b] for a in G.generators for b in G.generators]
    D = closure(comms, max_order=G.order, dim=G.dim)
    changed = True
    while changed:
        changed = False
        for g in G.generators:
            for d in D.generators:
                c = g @ d @ inv[g]
                if c not in D:
                    D = closure(list(D.generators) + [c], max_order=G.order, dim=G.dim)
                    changed = True
    return D


def _factorize(n: int) -> dict:
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _log_p(p: int, c: int) -> int:
    k = 0
    while c > 1:
        c //= p
        k += 1
    return k


def _abelian_invariants_from_counts(order: int, torsion_counts) -> list[int]:
    """Invariant factors of a finite abelian group.

    ``torsion_counts(m)`` must return the number of elements killed by m.
    """
    by_prime = {}
    for p, e in _factorize(order).items():
        sizes = [0]
        for k in range(1, e + 1):
            c = torsion_counts(p ** k)
            sizes.append(_log_p(p, c))
        # number of cyclic factors of order >= p^k
        ge = [sizes[k] - sizes[k - 1] for k in range(1, e + 1)]
        exps = []
        for k in range(1, e + 1):
            nxt = ge[k] if k < e else 0
            exps += [k] * (ge[k - 1] - nxt)
        by_prime[p] = sorted(exps, reverse=True)
    width = max((len(v) for v in by_prime.values()), default=0)
    factors = []
    for i in range(width):
        f = 1
        for p, exps in by_prime.items():
            if i < len(exps):
                f *= p ** exps[i]
        factors.append(f)
    return sorted(factors)


@dataclass(frozen=True)
class GroupFingerprint:
    order: int
    element_order_histogram: dict
    abelianization_invariants: tuple


def fingerprint(G: FinMatGroup) -> GroupFingerprint:
    """Order, element-order histogram and abelianization of G.

    The abelianization is read off the quotient by the derived subgroup:
    for each m dividing |G/G'| count the cosets killed by m and recover
    the invariant factors from those counts.
    """
    hist = Counter(element_order(g) for g in G.elements)
    D = derived_subgroup(G)
    # coset representatives of G/D with their orders in the quotient
    covered = set()
    quotient_orders = []
    for g in G.elements:
        if g in covered:
            continue
        covered.update(g @ d for d in D.elements)
        x, k = g, 1
        while x not in D:
            x = x @ g
            k += 1
        quotient_orders.append(k)
    qorder = len(quotient_orders)

    def killed_by(m):
        return sum(1 for k in quotient_orders if m % k == 0)

    inv = _abelian_invariants_from_counts(qorder, killed_by) if qorder > 1 else []
    return GroupFingerprint(G.order, dict(sorted(hist.items())), tuple(inv))
