"""finloc: finite sup-lattice and locale kernel.

Locale-valued relation calculus, module duality, finite sheaves and their
discrete modules, cone calculus, and coend reconstruction of finite
groupoids from their action categories.
"""

__version__ = "0.1.0"

from .lattice import (
    FiniteLocale,
    FiniteSupLattice,
    SupMorphism,
    build_locale,
    build_suplattice,
    function_lattice,
    is_frame,
    points,
    power_locale,
)
from .relation import LRelation, check_axioms, classify, graph, tabulate

__all__ = [
    "FiniteLocale",
    "FiniteSupLattice",
    "LRelation",
    "SupMorphism",
    "build_locale",
    "build_suplattice",
    "check_axioms",
    "classify",
    "function_lattice",
    "graph",
    "is_frame",
    "points",
    "power_locale",
    "tabulate",
]
