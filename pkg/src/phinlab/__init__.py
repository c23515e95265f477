"""Exact linear algebra of filtered (phi,N)-modules, refinements and L-invariants."""

from .exact_core import DualScalar, FieldContext, SemilinearScalar
from .phin_module import FilteredPhiNModule
from .refinement import Refinement

__all__ = ["DualScalar", "FieldContext", "FilteredPhiNModule", "Refinement", "SemilinearScalar"]
