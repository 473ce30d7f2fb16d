"""Exact computations with crystallographic groups: centers, H^1, GL(n,Z)
normalizers, affine normalizers and their fixed-point iteration."""

from .crystal import (AffNormalizerResult, AnalysisReport, CrystGroup, a0_lattice,
                      affine_normalizer, analyze, aut_is_crystallographic_check,
                      center_trivial, construct_complete, direct_product, h1_invariants,
                      iterate_fixpoint, make_cryst, out_order, rebase)
from .exact import IntMatrix, Lattice, RatVector
from .matgroup import FinMatGroup, closure
from .normalizer import NormalizerConfig, NormalizerResult, normalizer

__version__ = "0.1.0"
