"""Numerical classification of simple singularities of smooth maps R^n -> R^n.

Builds smooth kernel/cokernel fields (fibering pairs) near a rank-drop point
via bordered linear systems, evaluates the associated scalar functionals by
exact jet arithmetic, reduces maps to local scalar form, and decides among
fold/cusp-type ordinary singularities, maximal transverse singularities and
transversality up to a finite order cap.
"""

from .classify import Classification, Tolerances, classify_point, transversality_order
from .fibering import fibering_functionals, make_fibering_pair, pair_transform, rescale_pair
from .gallery import gallery_map, list_gallery
from .lsreduce import canonical_functionals, local_representation, ls_conditions
from .model import AffinePair, MapModel, conjugate, is_simple_singularity

__all__ = [
    "AffinePair",
    "Classification",
    "MapModel",
    "Tolerances",
    "canonical_functionals",
    "classify_point",
    "conjugate",
    "fibering_functionals",
    "gallery_map",
    "is_simple_singularity",
    "list_gallery",
    "local_representation",
    "ls_conditions",
    "make_fibering_pair",
    "pair_transform",
    "rescale_pair",
    "transversality_order",
]
