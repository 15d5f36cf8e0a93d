"""Potts model hypersurfaces: graph polynomials, point counts over finite fields,
class predictions and simplex averages."""

from .counting import CountRecord, PolySystem, brute_count, reduced_count, tutte_count, zfrak
from .fields import FieldSpec, make_field
from .graphs import Graph, build_family, complete, load_graph, polygon, polygon_chain, tetra_chain
from .polynomials import MultiPoly, kirchhoff, normalized_tutte, parse_polynomial, phi, tutte

__version__ = "0.1.0"

__all__ = [
    "CountRecord",
    "FieldSpec",
    "Graph",
    "MultiPoly",
    "PolySystem",
    "brute_count",
    "build_family",
    "complete",
    "kirchhoff",
    "load_graph",
    "make_field",
    "normalized_tutte",
    "parse_polynomial",
    "phi",
    "polygon",
    "polygon_chain",
    "reduced_count",
    "tetra_chain",
    "tutte",
    "tutte_count",
    "zfrak",
]
