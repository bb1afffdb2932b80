"""Topological dynamics on metric graphs."""

__version__ = "0.1.0"

from .errors import DomainError, GraphDynError, NotMarkovError, UnsupportedError
from .metric_graph import Graph, GraphPoint, Subgraph, are_disjoint, ball, diameter, distance, unit_circle, unit_interval
from .dynamics import (
    LogisticMap,
    MapSystem,
    PLGraphMap,
    PLPiece,
    image,
    load_map,
    map_from_dict,
    map_to_dict,
    markov_matrix,
    orbit,
    preimage,
)
from .entropy import horseshoe_search, lap_entropy, markov_entropy, sequence_entropy_markov
from .structure import detect_cycles, solenoid_search
from .birkhoff import classify_pair, mean_distance

__all__ = [
    "DomainError", "GraphDynError", "NotMarkovError", "UnsupportedError",
    "Graph", "GraphPoint", "Subgraph", "are_disjoint", "ball", "diameter", "distance", "unit_circle", "unit_interval",
    "LogisticMap", "MapSystem", "PLGraphMap", "PLPiece", "image", "load_map", "map_from_dict", "map_to_dict",
    "markov_matrix", "orbit", "preimage",
    "horseshoe_search", "lap_entropy", "markov_entropy", "sequence_entropy_markov",
    "detect_cycles", "solenoid_search", "classify_pair", "mean_distance",
]
