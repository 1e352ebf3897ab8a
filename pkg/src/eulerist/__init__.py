"""Euler characteristic profiles and hybrid transforms of multi-parameter filtrations."""

__version__ = "0.1.0"

from .builders import cech, codensity, function_extension, minimal_enclosing_ball, rips
from .complex import FiltrationError, MultiFiltration, ValidationReport, euler_characteristic, validate
from .estimators import EulerProfile, GraphFiltration, HybridTransform, PointCloudFiltration
from .euler import GridSpec, ProfileGrid, compute_ecp, l1_window_norm, pushforward_ecc, quantile_grid
from .graph import Graph, closeness_centrality, edge_betweenness, forman_curvature, graph_lower_star, hks
from .persistence import PersistenceDiagram, ecc_from_diagram, ht_from_diagram, reduce, w1_diagram_distance
from .signed import SignedBarcode, signed_barcode, signed_w1
from .transforms import (
    DualGridSpec,
    PrimitiveKernel,
    get_kernel,
    ht_quantile_grid,
    hybrid_transform,
    numeric_ht_oracle,
    restriction_curve,
)

__all__ = [
    "DualGridSpec",
    "EulerProfile",
    "FiltrationError",
    "Graph",
    "GraphFiltration",
    "GridSpec",
    "HybridTransform",
    "MultiFiltration",
    "PersistenceDiagram",
    "PointCloudFiltration",
    "PrimitiveKernel",
    "ProfileGrid",
    "SignedBarcode",
    "ValidationReport",
    "cech",
    "closeness_centrality",
    "codensity",
    "compute_ecp",
    "ecc_from_diagram",
    "edge_betweenness",
    "euler_characteristic",
    "forman_curvature",
    "function_extension",
    "get_kernel",
    "graph_lower_star",
    "hks",
    "ht_from_diagram",
    "ht_quantile_grid",
    "hybrid_transform",
    "l1_window_norm",
    "minimal_enclosing_ball",
    "numeric_ht_oracle",
    "pushforward_ecc",
    "quantile_grid",
    "reduce",
    "restriction_curve",
    "rips",
    "signed_barcode",
    "signed_w1",
    "validate",
    "w1_diagram_distance",
]
