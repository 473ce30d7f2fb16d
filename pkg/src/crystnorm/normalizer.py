"""Normalizers of finite groups in GL(n, Z)."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import BackendMismatch, NormalizerNotFinite, OrderCapExceeded
from .exact import IntMatrix, rat_inverse, rat_rank
from .forms import SymForm, average_form, invariant_form_space, isometries
from .matgroup import DEFAULT_MAX_ORDER, FinMatGroup, closure, normalizes

log = logging.getLogger(__name__)

CERTIFIED = "certified"
HEURISTIC = "heuristic-complete"
INFINITE = "infinite-or-cap-exceeded"


@dataclass(frozen=True)
class NormalizerResult:
    group: Optional[FinMatGroup]
    status: str
    backend: str
    search_bound_used: object

    @property
    def is_finite(self) -> bool:
        return self.status != INFINITE and self.group is not None

    @property
    def order(self) -> Optional[int]:
        return self.group.order if self.group is not None else None


@dataclass(frozen=True)
class NormalizerConfig:
    backend: str = "form"  # form | brute | both
    bound: int = 3
    max_order: int = DEFAULT_MAX_ORDER
    diag_bound_factor: Fraction = Fraction(4)

    def __post_init__(self):
        if self.backend not in ("form", "brute", "both"):
            raise ValueError(f"unknown backend {self.backend!r}")
        object.__setattr__(self, "diag_bound_factor", Fraction(self.diag_bound_factor))


# -- brute force -------------------------------------------------------------

def _det_batch(M: np.ndarray) -> np.ndarray:
    """Integer determinants of a stack of small square matrices (Laplace)."""
    n = M.shape[-1]
    if n == 1:
        return M[..., 0, 0]
    if n == 2:
        return M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
    total = np.zeros(M.shape[:-2], dtype=np.int64)
    for j in range(n):
        minor = np.delete(np.delete(M, 0, axis=-2), j, axis=-1)
        term = M[..., 0, j] * _det_batch(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def _adjugate_batch(M: np.ndarray) -> np.ndarray:
    n = M.shape[-1]
    adj = np.empty_like(M)
    if n == 1:
        adj[..., 0, 0] = 1
        return adj
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(M, i, axis=-2), j, axis=-1)
            adj[..., j, i] = (-1) ** (i + j) * _det_batch(minor)
    return adj


def _encode(Y: np.ndarray, radius: int) -> np.ndarray:
    base = 2 * radius + 1
    flat = Y.reshape(Y.shape[0], -1) + radius
    weights = base ** np.arange(flat.shape[1], dtype=np.int64)
    return flat @ weights


def normalizer_bruteforce(G: FinMatGroup, entry_bound: int = 3,
                          max_order: int = DEFAULT_MAX_ORDER) -> NormalizerResult:
    """Every unimodular X with entries in [-B, B] normalizing G, then closed.

    Cost grows like (2B+1)^(n^2); meant as an oracle for n <= 3.
    """
    n = G.dim
    B = entry_bound
    vals = np.arange(-B, B + 1, dtype=np.int64)
    radius = max(1, max(abs(x) for g in G.elements for x in g.entries))
    if (2 * radius + 1) ** (n * n) >= 2 ** 62:
        raise ValueError("group entries too large for brute-force encoding")
    gcodes = np.unique(_encode(np.array([g.tolist() for g in G.elements], dtype=np.int64), radius))
    gens = np.array([g.tolist() for g in G.generators], dtype=np.int64)

    rest = n * (n - 1)
    tail = np.array(list(itertools.product(vals, repeat=rest)), dtype=np.int64).reshape(-1, n - 1, n) \
        if rest else np.zeros((1, 0, n), dtype=np.int64)
    found = []
    for first in itertools.product(vals.tolist(), repeat=n):
        X = np.empty((tail.shape[0], n, n), dtype=np.int64)
        X[:, 0, :] = first
        X[:, 1:, :] = tail
        det = _det_batch(X)
        keep = np.abs(det) == 1
        if not keep.any():
            continue
        X = X[keep]
        Xinv = _adjugate_batch(X) * det[keep][:, None, None]
        ok = np.ones(X.shape[0], dtype=bool)
        for g in gens:
            Y = X @ g @ Xinv
            inrange = np.all(np.abs(Y.reshape(Y.shape[0], -1)) <= radius, axis=1)
            codes = _encode(np.clip(Y, -radius, radius), radius)
            ok &= inrange & np.isin(codes, gcodes)
        for m in X[ok]:
            found.append(IntMatrix(m.tolist()))
    log.debug("brute force bound %d found %d normalizing matrices", B, len(found))
    try:
        group = closure(list(G.generators) + found, max_order=max_order, dim=n)
    except OrderCapExceeded:
        return NormalizerResult(None, INFINITE, "brute", B)
    return NormalizerResult(group, HEURISTIC, "brute", B)


# -- form based ----------------------------------------------------------------

def _is_scalar_group(G: FinMatGroup) -> bool:
    ident = IntMatrix.identity(G.dim)
    return all(g == ident or g == -ident for g in G.elements)


def _pivot_positions(basis: list[SymForm]):
    """Entry positions (diagonal first) whose values determine a form in span(basis)."""
    n = basis[0].dim
    order = [(i, i) for i in range(n)] + [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = []
    rows = []
    for pos in order:
        trial = rows + [[F[pos] for F in basis]]
        if rat_rank(trial) > len(rows):
            rows = trial
            chosen.append(pos)
            if len(chosen) == len(basis):
                break
    return chosen, rows


def candidate_forms(basis: list[SymForm], Q0: SymForm, diag_bound_factor) -> list[SymForm]:
    """Integral positive definite forms in span(basis) with det Q0 and bounded diagonal.

    Values at a set of pivot entries determine the coordinates, so the
    enumeration walks those values (diagonal in [1, D], off-diagonal in
    [-D, D], since |Q_ij| <= max diag for positive definite Q).
    """
    D = int(Fraction(diag_bound_factor) * Q0.max_diagonal())
    positions, P = _pivot_positions(basis)
    Pinv = rat_inverse(P)
    target = Q0.det()
    n = Q0.dim
    ranges = [range(1, D + 1) if i == j else range(-D, D + 1) for i, j in positions]
    out = []
    for values in itertools.product(*ranges):
        coords = [sum(Pinv[k][l] * values[l] for l in range(len(values))) for k in range(len(values))]
        if any(c.denominator != 1 for c in coords):
            continue
        entries = [0] * (n * n)
        for c, F in zip(coords, basis):
            c = int(c)
            if c:
                for idx, x in enumerate(F.matrix.entries):
                    entries[idx] += c * x
        Q = SymForm(IntMatrix.from_flat(n, n, entries))
        if Q.max_diagonal() > D or Q.det() != target or not Q.is_positive_definite():
            continue
        out.append(Q)
    return out


def normalizer_formbased(G: FinMatGroup, diag_bound_factor=Fraction(4),
                         max_order: int = DEFAULT_MAX_ORDER) -> NormalizerResult:
    """Normalizer via the isometries of the averaged invariant form.

    A normalizing X maps the averaged form Q0 to another invariant form of
    equal determinant.  With a one-dimensional form space that form is Q0
    itself, so the result is exact (``certified``); otherwise the target
    forms are enumerated up to a diagonal bound (``heuristic-complete``).
    """
    if G.dim >= 2 and _is_scalar_group(G):
        raise NormalizerNotFinite("a group of scalar matrices has normalizer GL(n,Z)")
    basis = invariant_form_space(G)
    Q0 = average_form(G).primitive()

    if len(basis) == 1:
        targets = [Q0]
        status = CERTIFIED
    else:
        targets = candidate_forms(basis, Q0, diag_bound_factor)
        status = HEURISTIC
        log.debug("form space of dim %d: %d candidate target forms", len(basis), len(targets))

    found = []
    for Q in targets:
        for X in isometries(Q0, Q):
            if normalizes(G, X):
                found.append(X)
    try:
        group = closure(list(G.generators) + found, max_order=max_order, dim=G.dim)
    except OrderCapExceeded:
        return NormalizerResult(None, INFINITE, "form", Fraction(diag_bound_factor))
    if not G.is_subgroup_of(group):
        raise AssertionError("normalizer does not contain the group")
    return NormalizerResult(group, status, "form", Fraction(diag_bound_factor))


def normalizer(G: FinMatGroup, config: Optional[NormalizerConfig] = None) -> NormalizerResult:
    config = config or NormalizerConfig()
    if config.backend == "brute":
        return normalizer_bruteforce(G, config.bound, config.max_order)
    res = normalizer_formbased(G, config.diag_bound_factor, config.max_order)
    if config.backend == "both":
        brute = normalizer_bruteforce(G, config.bound, config.max_order)
        if brute.is_finite and res.is_finite and not brute.group.is_subgroup_of(res.group):
            raise BackendMismatch(
                f"brute-force normalizer (order {brute.order}) not contained in "
                f"form-based normalizer (order {res.order})")
    return res
