"""Graph products of groups and their extension graphs.

The most used names are re-exported here.  Each submodule holds the rest:
``core_graph``, ``groups``, ``graph_product``, ``parabolics``,
``extension_graph``, ``quasi_median`` and ``wreath``.
"""

from .core_graph import SimplicialGraph, complete_graph, cycle_graph, path_graph, star_graph
from .errors import BudgetExceeded, GpwbError, HypothesisError, InputError, VerificationFailure
from .extension_graph import ExtVertex, WindowFamily, build_window, girth_check
from .graph_product import NormalWord, ProductContext, inv, mul, normalize
from .groups import GraphAction, GroupTable, cyclic, direct_product, symmetric
from .parabolics import coset_canonical, stab_intersection
from .quasi_median import build_cayley_ball, verify_iso
from .wreath import WreathContext, edge_stabilizer

__version__ = "0.1.0"

__all__ = [
    "SimplicialGraph", "complete_graph", "cycle_graph", "path_graph", "star_graph",
    "BudgetExceeded", "GpwbError", "HypothesisError", "InputError", "VerificationFailure",
    "ExtVertex", "WindowFamily", "build_window", "girth_check",
    "NormalWord", "ProductContext", "inv", "mul", "normalize",
    "GraphAction", "GroupTable", "cyclic", "direct_product", "symmetric",
    "coset_canonical", "stab_intersection",
    "build_cayley_ball", "verify_iso",
    "WreathContext", "edge_stabilizer",
    "__version__",
]
