"""Radial graph embeddings whose distance from the origin tracks vertex centrality."""

from __future__ import annotations

__version__ = "0.1.0"

from .graphs import Graph, VertexMap, largest_connected_component, load_edge_list, read_edge_list
from .layout import LayoutConfig, embed, radial_scores
from .spectral import spectral_init

__all__ = [
    "__version__",
    "Graph",
    "VertexMap",
    "LayoutConfig",
    "embed",
    "largest_connected_component",
    "load_edge_list",
    "radial_scores",
    "read_edge_list",
    "spectral_init",
]
