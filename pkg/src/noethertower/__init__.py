"""Exact computations with towers of diagram and group algebras.

Builds Temperley-Lieb, Brauer and partition algebras and FI group-algebra
towers, and checks at finite truncation the hypotheses of a noetherian
criterion for sequences of modules linked by linear shift maps.
"""
from .algebra import (
    DiagramAlgebra,
    FDModule,
    build_algebra,
    coinvariants,
    equivariant_projection,
    hom_space,
    isotypic_trivial,
    radical,
    trivial_character,
)
from .diagrams import Diagram, Family, compose, enumerate_diagrams
from .fi import build_fi_Mm, fi_certificate, mu
from .stability import build_Mm, ca_hom, criterion_certificate
from .tower import F, Tower, TruncSubmodule, proof_replay, submodule_closure

__version__ = "0.1.0"

__all__ = [
    "DiagramAlgebra",
    "FDModule",
    "build_algebra",
    "coinvariants",
    "equivariant_projection",
    "hom_space",
    "isotypic_trivial",
    "radical",
    "trivial_character",
    "Diagram",
    "Family",
    "compose",
    "enumerate_diagrams",
    "build_fi_Mm",
    "fi_certificate",
    "mu",
    "build_Mm",
    "ca_hom",
    "criterion_certificate",
    "F",
    "Tower",
    "TruncSubmodule",
    "proof_replay",
    "submodule_closure",
]
