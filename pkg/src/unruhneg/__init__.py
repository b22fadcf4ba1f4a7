"""Negativity of Alice-Rob states for Dirac-like fields seen by an accelerated observer."""

from .negativity import NegativityResult, converged_negativity, negativity_of, spectrum
from .params import Bipartition, Family, UnruhWeights, make_squeezing
from .states import PtMatrix, assemble_pt, cutoff_predicate

__all__ = [
    "Bipartition",
    "Family",
    "NegativityResult",
    "PtMatrix",
    "UnruhWeights",
    "assemble_pt",
    "converged_negativity",
    "cutoff_predicate",
    "make_squeezing",
    "negativity_of",
    "spectrum",
]
__version__ = "0.1.0"
