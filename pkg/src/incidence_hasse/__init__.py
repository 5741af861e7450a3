"""Hasse diagrams with large chromatic number from point-line incidences."""

__version__ = "0.1.0"

from .analysis import (
    AnalysisReport,
    SearchBudget,
    analyze_graph,
    chromatic_number,
    count_cycles_bipartite,
    find_ordered_path_s,
    girth,
    independence_number,
    is_triangle_free,
)
from .geometry import (
    IncidenceStructure,
    Line,
    Point,
    collinearity_graph,
    compute_incidences,
    max_common_neighbors,
    standard_config,
)
from .graph import OrderedGraph, incidence_graph
from .hasse import build_hasse_graph, shift_graph, to_poset, verify_no_monotone_cycle
from .patterns import find_fan, find_grid, pattern_free_sparsify
from .sparsifier import SparsifyParams, default_q, sparsify
