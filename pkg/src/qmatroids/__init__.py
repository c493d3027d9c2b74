"""Exact computation and classification of q-matroids."""

from .extension import extend, modular_cuts, selectors
from .gf import SubspaceRep, grassmannian, parse_subspace, reverse_canonical
from .group import automorphism_order, canonical_form, is_isomorphic
from .qmatroid import QMatroid, decode, dual, restriction, uniform

__version__ = "0.1.0"
